"""Marchenko-Pastur law for ratio ``y`` in (0, 1)."""

from dataclasses import dataclass
import cmath
import math

import numpy as np

CDF_TOL = 1e-10


@dataclass(frozen=True)
class MPParams:
    y: float

    def __post_init__(self):
        if not 0.0 < self.y < 1.0:
            raise ValueError(f"y must lie in (0, 1), got {self.y}")

    @property
    def a(self):
        return (1.0 - math.sqrt(self.y)) ** 2

    @property
    def b(self):
        return (1.0 + math.sqrt(self.y)) ** 2


@dataclass(frozen=True)
class SpectralDomainPoint:
    E: float
    eta: float
    tau: float
    n: int

    @property
    def z(self):
        return complex(self.E, self.eta)

    def contains(self, params):
        """Membership of ``E + i eta`` in the domain S_tau for this ``n``."""
        lo = self.n ** (-0.25 + self.tau)
        return (kappa(self.E, params) <= 1.0 / self.tau
                and lo <= self.eta <= 1.0 / self.tau)


def mp_density(x, params):
    a, b, y = params.a, params.b, params.y
    if x <= a or x >= b:
        return 0.0
    return math.sqrt((b - x) * (x - a)) / (2.0 * math.pi * x * y)


def mp_density_array(x, params):
    x = np.asarray(x, dtype=np.float64)
    a, b, y = params.a, params.b, params.y
    inside = (x > a) & (x < b)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = np.sqrt((b - xi) * (xi - a)) / (2.0 * np.pi * xi * y)
    return out


def adaptive_simpson(f, lo, hi, tol, max_depth=50):
    """Adaptive Simpson quadrature with Richardson correction."""
    def simpson(fa, fm, fb, h):
        return h * (fa + 4.0 * fm + fb) / 6.0

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        diff = left + right - whole
        if depth <= 0 or abs(diff) <= 15.0 * tol:
            return left + right + diff / 15.0
        return (recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))

    if hi == lo:
        return 0.0
    fa, fb, fm = f(lo), f(hi), f(0.5 * (lo + hi))
    return recurse(lo, hi, fa, fm, fb, simpson(fa, fm, fb, hi - lo), tol, max_depth)


# x = a + (b - a) sin^2(theta) turns the density into a smooth integrand on [0, pi/2]

def _theta(x, params):
    a, b = params.a, params.b
    return math.asin(math.sqrt(min(1.0, max(0.0, (x - a) / (b - a)))))


def _theta_integrand(params):
    a, b, y = params.a, params.b, params.y
    w = b - a
    coef = w * w / (4.0 * math.pi * y)

    def f(t):
        s = math.sin(2.0 * t)
        x = a + w * math.sin(t) ** 2
        return coef * s * s / x

    return f


def mp_cdf(x, params, tol=CDF_TOL):
    if x <= params.a:
        return 0.0
    if x >= params.b:
        return 1.0
    return adaptive_simpson(_theta_integrand(params), 0.0, _theta(x, params), 0.1 * tol)


def mp_cdf_sorted(xs, params, tol=CDF_TOL):
    """CDF at many points, integrating piecewise between consecutive sorted abscissae."""
    xs = np.asarray(xs, dtype=np.float64)
    order = np.argsort(xs, kind="stable")
    out = np.empty_like(xs)
    f = _theta_integrand(params)
    inside = [(i, _theta(xs[i], params)) for i in order if params.a < xs[i] < params.b]
    piece_tol = 0.1 * tol / max(1, len(inside))
    acc, prev = 0.0, 0.0
    for i in order:
        if xs[i] <= params.a:
            out[i] = 0.0
        elif xs[i] >= params.b:
            out[i] = 1.0
    for i, t in inside:
        acc += adaptive_simpson(f, prev, t, piece_tol)
        prev = t
        out[i] = min(acc, 1.0)
    return out


def mp_interval(x1, x2, params):
    if x1 > x2:
        raise ValueError("need x1 <= x2")
    return mp_cdf(x2, params) - mp_cdf(x1, params)


def mp_stieltjes(z, params):
    """Stieltjes transform; of the two roots the one with positive imaginary part."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("need Im z > 0")
    y = params.y
    u = y + z - 1.0
    root = cmath.sqrt(u * u - 4.0 * y * z)
    # roots of y z s^2 + u s + 1 = 0 without cancellation: q / (y z) and 1 / q
    if (u.conjugate() * root).real < 0:
        root = -root
    q = -0.5 * (u + root)
    c1 = q / (y * z)
    c2 = 1.0 / q
    return c1 if c1.imag >= c2.imag else c2


def fixed_point_residual(s, z, params):
    """``|s - 1 / (1 - y - z - y z s)|``."""
    y = params.y
    return abs(s - 1.0 / (1.0 - y - z - y * z * s))


def kappa(E, params):
    return min(abs(E - params.a), abs(E - params.b))


def stability_bound(delta, E, eta, params, C=1.0):
    """``C delta / sqrt(kappa + eta + delta)``."""
    if delta <= 0 or eta <= 0 or C <= 0:
        raise ValueError("delta, eta and C must be positive")
    return C * delta / math.sqrt(kappa(E, params) + eta + delta)


def sample_domain(params, n, tau, count, rng):
    """``count`` points of S_tau, E uniform over its range, eta log-uniform.

    ``rng`` is a ``SplitMix64``.
    """
    lo_eta, hi_eta = n ** (-0.25 + tau), 1.0 / tau
    e_lo, e_hi = params.a - 1.0 / tau, params.b + 1.0 / tau
    out = []
    while len(out) < count:
        E = e_lo + (e_hi - e_lo) * rng.uniform()
        eta = lo_eta * (hi_eta / lo_eta) ** rng.uniform()
        pt = SpectralDomainPoint(E, eta, tau, n)
        if pt.contains(params):
            out.append(pt)
    return out
