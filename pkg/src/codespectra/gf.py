"""Arithmetic in GF(2^m) on integer bitmasks.

An element is a plain ``int`` whose bit ``i`` is the coefficient of ``x^i``
in the polynomial basis ``{1, x, ..., x^(m-1)}``.
"""

from dataclasses import dataclass
from functools import lru_cache

MAX_DEGREE = 16

# Smallest-bitmask irreducible polynomial of each degree.
DEFAULT_MODULI = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
}


class InvalidFieldSpec(ValueError):
    pass


def poly_mulmod(a, b, mod):
    """Carry-less product of ``a`` and ``b`` reduced modulo ``mod``."""
    deg = mod.bit_length() - 1
    top = 1 << deg
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= mod
    return r


def poly_mod(a, mod):
    dm = mod.bit_length()
    while a.bit_length() >= dm:
        a ^= mod << (a.bit_length() - dm)
    return a


def poly_gcd(a, b):
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(mod):
    """Rabin's test: x^(2^m) = x mod f and gcd(x^(2^(m/q)) - x, f) = 1 for primes q | m."""
    m = mod.bit_length() - 1
    if m < 1:
        return False
    if m == 1:
        return True

    def x_pow_2k(k):
        r = 2  # the element x
        for _ in range(k):
            r = poly_mulmod(r, r, mod)
        return r

    if x_pow_2k(m) != poly_mod(2, mod):
        return False
    for q in _prime_factors(m):
        h = x_pow_2k(m // q) ^ 2
        if poly_gcd(mod, h) != 1:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    degree: int
    modulus: int

    def __post_init__(self):
        if not 2 <= self.degree <= MAX_DEGREE:
            raise InvalidFieldSpec(f"degree must lie in [2, {MAX_DEGREE}], got {self.degree}")
        if self.modulus.bit_length() - 1 != self.degree:
            raise InvalidFieldSpec(
                f"modulus {self.modulus:#x} does not have degree {self.degree}")

    @classmethod
    def default(cls, m):
        if m not in DEFAULT_MODULI:
            raise InvalidFieldSpec(f"no default modulus for degree {m}")
        return cls(m, DEFAULT_MODULI[m])

    @property
    def order(self):
        return 1 << self.degree

    def is_valid(self):
        return is_irreducible(self.modulus)

    def contains(self, a):
        return 0 <= a < self.order


def ff_add(a, b):
    return a ^ b


def ff_mul(a, b, spec):
    return poly_mulmod(a, b, spec.modulus)


def ff_pow(a, e, spec):
    """``a**e`` by square-and-multiply. ``0**0`` is taken to be 1."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    result = 1
    base = a
    while e:
        if e & 1:
            result = poly_mulmod(result, base, spec.modulus)
        base = poly_mulmod(base, base, spec.modulus)
        e >>= 1
    return result


def element_order(a, spec):
    if a == 0:
        raise ValueError("zero has no multiplicative order")
    group = spec.order - 1
    order = group
    for q in _prime_factors(group):
        while order % q == 0 and ff_pow(a, order // q, spec) == 1:
            order //= q
    return order


@lru_cache(maxsize=None)
def find_primitive(spec):
    """Smallest element of multiplicative order 2^m - 1."""
    if not spec.is_valid():
        raise InvalidFieldSpec(f"modulus {spec.modulus:#x} is reducible")
    group = spec.order - 1
    cofactors = [group // q for q in _prime_factors(group)]
    for g in range(2, spec.order):
        if all(ff_pow(g, c, spec) != 1 for c in cofactors):
            return g
    raise InvalidFieldSpec(f"no primitive element under modulus {spec.modulus:#x}")


def power_table(g, spec):
    """List ``[g^0, g^1, ..., g^(2^m - 2)]``."""
    out = [1] * (spec.order - 1)
    for j in range(1, len(out)):
        out[j] = poly_mulmod(out[j - 1], g, spec.modulus)
    return out
