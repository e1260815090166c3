"""Binary linear codes: APN-based and first-order Reed-Muller constructions,
dual distance, codeword enumeration and the +/-1 character map."""

from dataclasses import dataclass, field
from functools import cached_property
import itertools
import json

import numpy as np

from .gf import FieldSpec, find_primitive, power_table

ENUMERATION_CAP = 22


class CodeConstructionError(ValueError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class AtLeast(int):
    """Lower bound returned by :func:`dual_distance` when no dependency <= cap exists."""

    def __repr__(self):
        return f"AtLeast({int(self)})"

    def __str__(self):
        return f">={int(self)}"


def gf2_rank(rows):
    """Rank over GF(2) of a sequence of int bitsets."""
    pivots = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = r
                break
            r ^= pivots[top]
    return len(pivots)


def _rows_to_ints(matrix):
    n = matrix.shape[1]
    weights = [1 << j for j in range(n)]
    return [sum(w for w, b in zip(weights, row) if b) for row in matrix.tolist()]


@dataclass(frozen=True, eq=False)
class LinearCode:
    length: int
    dimension: int
    generator: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        g = np.array(self.generator, dtype=np.uint8) & 1
        if g.ndim != 2 or g.shape != (self.dimension, self.length):
            raise ValueError(f"generator shape {g.shape} != ({self.dimension}, {self.length})")
        if not 1 <= self.dimension <= self.length:
            raise ValueError("need 1 <= k <= n")
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)
        rank = gf2_rank(self.row_ints)
        if rank != self.dimension:
            raise CodeConstructionError(
                f"generator of {self.label or 'code'} has rank {rank} < {self.dimension}", rank)

    @cached_property
    def row_ints(self):
        """Generator rows as ints; bit j is column j."""
        return _rows_to_ints(self.generator)

    @cached_property
    def column_masks(self):
        """Generator columns as uint64; bit i is row i (requires k <= 64)."""
        if self.dimension > 64:
            raise ValueError("column packing supports k <= 64")
        weights = (np.uint64(1) << np.arange(self.dimension, dtype=np.uint64))
        return (self.generator.astype(np.uint64) * weights[:, None]).sum(axis=0).astype(np.uint64)

    def encode(self, message):
        """Codeword ``uG`` as a uint8 vector for an int message ``u``."""
        return codeword_bits(self, np.array([message], dtype=np.uint64))[0]

    def to_descriptor(self):
        width = (self.length + 3) // 4
        return {
            "label": self.label,
            "n": self.length,
            "k": self.dimension,
            "generator_rows_hex": [format(r, f"0{width}x") for r in self.row_ints],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_descriptor(), **kw)

    @classmethod
    def from_descriptor(cls, d):
        n, k = d["n"], d["k"]
        rows = [int(h, 16) for h in d["generator_rows_hex"]]
        g = np.array([[(r >> j) & 1 for j in range(n)] for r in rows], dtype=np.uint8)
        return cls(n, k, g.reshape(k, n), d.get("label", ""))


def parity(x):
    return (np.bitwise_count(np.asarray(x, dtype=np.uint64)) & 1).astype(np.uint8)


def codeword_bits(code, messages):
    """Codewords for an array of int messages, shape ``(len(messages), n)``."""
    msgs = np.asarray(messages, dtype=np.uint64)
    return parity(msgs[:, None] & code.column_masks[None, :])


def build_apn_code(m, exponent=3, spec=None):
    """Code generated by the binary expansion of ``[alpha^j ; f(alpha^j)]``, ``f = x^exponent``.

    Length ``2^m - 1``, dimension ``2m``. Dual distance is 5 exactly when
    ``f`` is APN (e.g. the Gold exponents ``2^i + 1`` with ``gcd(i, m) = 1``).
    """
    if exponent < 2:
        raise ValueError("exponent must be >= 2")
    spec = spec or FieldSpec.default(m)
    n = spec.order - 1
    alpha = find_primitive(spec)
    powers = power_table(alpha, spec)
    images = [powers[(j * exponent) % n] for j in range(n)]
    bits = np.arange(m)
    top = (np.array(powers)[None, :] >> bits[:, None]) & 1
    bottom = (np.array(images)[None, :] >> bits[:, None]) & 1
    g = np.vstack([top, bottom]).astype(np.uint8)
    rank = gf2_rank(_rows_to_ints(g))
    if rank < 2 * m:
        raise CodeConstructionError(
            f"x^{exponent} over GF(2^{m}) gives a generator of rank {rank} < {2 * m}", rank)
    return LinearCode(n, 2 * m, g, f"apn-x{exponent}-m{m}")


def build_rm1(m):
    """First-order Reed-Muller code RM(1, m): all-ones row plus the m coordinate bits."""
    if not 2 <= m <= 16:
        raise ValueError("m must lie in [2, 16]")
    n = 1 << m
    j = np.arange(n)
    coord = (j[None, :] >> np.arange(m)[:, None]) & 1
    g = np.vstack([np.ones((1, n), dtype=np.int64), coord]).astype(np.uint8)
    return LinearCode(n, m + 1, g, f"rm1-m{m}")


def _pairs(n):
    i, j = np.triu_indices(n, 1)
    return i, j


def _generic_dependency(cols, w):
    """Meet-in-the-middle search for w columns XOR-ing to zero."""
    n = len(cols)
    cols = [int(c) for c in cols]
    h = w // 2
    table = {}
    for combo in itertools.combinations(range(n), h):
        v = 0
        for c in combo:
            v ^= cols[c]
        table.setdefault(v, []).append(combo)
    for combo in itertools.combinations(range(n), w - h):
        v = 0
        for c in combo:
            v ^= cols[c]
        for other in table.get(v, ()):
            if not set(other) & set(combo):
                return True
    return False


def dual_distance(code, cap=5):
    """Smallest w <= cap such that some w generator columns are dependent over GF(2).

    Returns an ``int`` when such w exists, otherwise ``AtLeast(cap + 1)``.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    cols = code.column_masks
    n = len(cols)
    if np.any(cols == 0):
        return 1
    if cap < 2:
        return AtLeast(2)
    if len(np.unique(cols)) < n:
        return 2
    if cap < 3:
        return AtLeast(3)

    pi, pj = _pairs(n)
    px = cols[pi] ^ cols[pj]
    order = np.argsort(px, kind="stable")
    spx = px[order]

    # w = 3: a column equals the XOR of two others
    col_sorted = np.argsort(cols)
    pos = np.searchsorted(cols[col_sorted], px)
    pos = np.minimum(pos, n - 1)
    hit = cols[col_sorted][pos] == px
    if np.any(hit):
        k = col_sorted[pos[hit]]
        if np.any((k != pi[hit]) & (k != pj[hit])):
            return 3
    if cap < 4:
        return AtLeast(4)

    # w = 4: two index-disjoint pairs with equal XOR
    dup = np.flatnonzero(spx[1:] == spx[:-1])
    if dup.size:
        for start in np.unique(np.searchsorted(spx, spx[dup])):
            stop = np.searchsorted(spx, spx[start], side="right")
            group = [(pi[order[t]], pj[order[t]]) for t in range(start, stop)]
            for (a, b), (c, d) in itertools.combinations(group, 2):
                if len({a, b, c, d}) == 4:
                    return 4
    if cap < 5:
        return AtLeast(5)

    # w = 5: column a XOR pair {i, j} equals pair {k, l}, all five distinct
    for a in range(n):
        v = px ^ cols[a]
        pos = np.minimum(np.searchsorted(spx, v), len(spx) - 1)
        hits = np.flatnonzero(spx[pos] == v)
        for h in hits:
            t = pos[h]
            while t < len(spx) and spx[t] == v[h]:
                idx = {a, pi[h], pj[h], pi[order[t]], pj[order[t]]}
                if len(idx) == 5:
                    return 5
                t += 1
    for w in range(6, cap + 1):
        if _generic_dependency(cols, w):
            return w
    return AtLeast(cap + 1)


def dual_basis(code):
    """Basis of the dual code as int bitsets (bit j = coordinate j)."""
    n = code.length
    rows = list(code.row_ints)
    pivot_cols = []
    r = 0
    for col in range(n):
        bit = 1 << col
        piv = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivot_cols.append(col)
        r += 1
    free = [c for c in range(n) if c not in set(pivot_cols)]
    basis = []
    for f in free:
        v = 1 << f
        for i, pc in enumerate(pivot_cols):
            if rows[i] >> f & 1:
                v |= 1 << pc
        basis.append(v)
    return basis


def in_dual(code, a):
    """Whether the bit-vector ``a`` satisfies ``G a^T = 0``."""
    a_int = a if isinstance(a, int) else sum(1 << j for j, b in enumerate(a) if b)
    return all(bin(r & a_int).count("1") % 2 == 0 for r in code.row_ints)


def dual_distance_bruteforce(code, limit=22):
    """Minimum weight of a nonzero dual word by enumerating all 2^(n-k) of them."""
    basis = dual_basis(code)
    r = len(basis)
    if r == 0:
        return None
    if r > limit:
        raise ValueError(f"n - k = {r} exceeds enumeration limit {limit}")
    # Gray-code walk over the dual; weights via Python big-int popcount
    best = code.length + 1
    v = 0
    for i in range(1, 1 << r):
        v ^= basis[(i & -i).bit_length() - 1]
        w = bin(v).count("1")
        if w < best:
            best = w
    return best


def enumerate_codewords(code):
    """Yield every codeword once, messages in counting order 0, 1, ..., 2^k - 1."""
    if code.dimension > ENUMERATION_CAP:
        raise ValueError(f"dimension {code.dimension} exceeds enumeration cap {ENUMERATION_CAP}")
    chunk = 1 << 12
    for start in range(0, 1 << code.dimension, chunk):
        msgs = np.arange(start, min(start + chunk, 1 << code.dimension), dtype=np.uint64)
        yield from codeword_bits(code, msgs)


def psi_map(codeword):
    """0 -> +1, 1 -> -1."""
    c = np.asarray(codeword)
    return (1 - 2 * (c & 1)).astype(np.int8)


def sample_signal_row(code, rng):
    """psi of a uniformly random codeword; the message is ``rng.bits(k)``."""
    return psi_map(code.encode(rng.bits(code.dimension)))
