"""Empirical spectral measures, distances to the MP law, Stieltjes transforms
and exact character-sum oracles."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .codes import ENUMERATION_CAP, codeword_bits, parity
from .mplaw import mp_cdf_sorted
from .seeding import mix
from .specmat import build_sample_matrix, gram_spectrum


@dataclass(frozen=True, eq=False)
class ESD:
    atoms: np.ndarray

    @classmethod
    def from_spectrum(cls, spectrum):
        return cls(np.sort(np.asarray(spectrum.eigenvalues, dtype=np.float64)))

    @property
    def p(self):
        return len(self.atoms)


@dataclass(frozen=True)
class TransformSample:
    z: complex
    value: complex
    trials: int
    std_err: float


def esd_cdf(esd, x):
    return np.searchsorted(esd.atoms, x, side="right") / esd.p


def cdf_differences(esd, params):
    """Candidate extrema of ``F_esd - F_mp``: at each distinct atom (value and
    left limit) and at the MP edges. Returns ``(points, right_values, left_values)``."""
    atoms = esd.atoms
    p = esd.p
    pts = np.unique(np.concatenate([atoms, [params.a, params.b]]))
    f_mp = mp_cdf_sorted(pts, params)
    right = np.searchsorted(atoms, pts, side="right") / p
    left = np.searchsorted(atoms, pts, side="left") / p
    return pts, right - f_mp, left - f_mp


def interval_sup_distance(esd, params):
    """``sup_I |mu(I) - rho_MP(I)|`` over all intervals, equal to ``sup D + sup(-D)``
    for ``D = F_esd - F_mp`` (both sups include the value 0 at +-infinity)."""
    _, right, left = cdf_differences(esd, params)
    d = np.concatenate([right, left])
    return float(max(0.0, d.max()) + max(0.0, -d.min()))


def empirical_stieltjes(esd, z):
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("need Im z > 0")
    return complex(np.mean(1.0 / (esd.atoms - z)))


def _summarize(z, values):
    values = np.asarray(values, dtype=np.complex128)
    t = len(values)
    if t > 1:
        se = max(np.std(values.real, ddof=1), np.std(values.imag, ddof=1)) / np.sqrt(t)
    else:
        se = 0.0
    # fixed left-to-right summation keeps the mean bit-reproducible
    total = 0j
    for v in values:
        total += v
    return TransformSample(complex(z), total / t, t, float(se))


def trial_transforms(sampler, p, zs, trials, master_seed, threads=None, method="lapack"):
    """Array ``(trials, len(zs))`` of empirical transforms; trial t uses seed ``mix(master_seed, t)``.

    ``sampler(p, seed)`` returns a ``SampleMatrix``.
    """
    zs = np.asarray(zs, dtype=np.complex128)

    def one(t):
        phi = sampler(p, mix(master_seed, t))
        ev = gram_spectrum(phi, method=method).eigenvalues
        return np.mean(1.0 / (ev[:, None] - zs[None, :]), axis=0)

    if threads == 1 or trials == 1:
        rows = [one(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(trials)))
    return np.array(rows)


def estimate_expected_stieltjes(code, p, z, trials, master_seed, threads=None):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if complex(z).imag <= 0:
        raise ValueError("need Im z > 0")
    vals = trial_transforms(lambda q, s: build_sample_matrix(code, q, s), p, [z],
                            trials, master_seed, threads)
    return _summarize(z, vals[:, 0])


def delta_perturbation(s_n, z, params):
    """``1/s_n - (1 - y - z - y z s_n)``: zero when ``s_n`` is the MP transform."""
    if s_n == 0:
        raise ValueError("s_n must be nonzero")
    y = params.y
    return 1.0 / s_n - (1.0 - y - z - y * z * s_n)


def delta_derivative(s_n, z, params):
    """``d Delta / d s_n``, used to propagate Monte Carlo error."""
    return -1.0 / (s_n * s_n) + params.y * z


# Exact oracles. Every codeword uG is visited once (messages 0 .. 2^k - 1);
# coordinate j of uG is parity(u & column_j).

def _check_cap(code):
    if code.dimension > ENUMERATION_CAP:
        raise ValueError(f"dimension {code.dimension} exceeds enumeration cap {ENUMERATION_CAP}")


def _signed_sum(code, coords):
    """``sum_c prod_{i in coords} psi(c_i)`` as a Python int."""
    _check_cap(code)
    masks = code.column_masks[list(coords)]
    total = 0
    chunk = 1 << 16
    for start in range(0, 1 << code.dimension, chunk):
        u = np.arange(start, min(start + chunk, 1 << code.dimension), dtype=np.uint64)
        bits = parity(u[:, None] & masks[None, :])
        signs = 1 - 2 * (bits.sum(axis=1, dtype=np.int64) & 1)
        total += int(signs.sum())
    return total


def moment_pair_oracle(code, j, k):
    """``E(X_lj X_lk)`` exactly: ``(1 / (n #C)) sum_c psi(c_j) psi(c_k)``."""
    return Fraction(_signed_sum(code, [j, k]), code.length << code.dimension)


def moment_quad_oracle(code, j, t, k, s):
    """``E(X_lj X_lt X_lk X_ls)`` exactly."""
    return Fraction(_signed_sum(code, [j, t, k, s]), code.length ** 2 << code.dimension)


def comes_in_pairs(*indices):
    """Every index occurs an even number of times (over GF(2), e_j + e_t + e_k + e_s = 0)."""
    counts = {}
    for i in indices:
        counts[i] = counts.get(i, 0) + 1
    return all(c % 2 == 0 for c in counts.values())


def character_sum_oracle(code, a):
    """``(1/#C) sum_c psi(a . c)``, which is 1 if ``a`` lies in the dual and 0 otherwise."""
    _check_cap(code)
    a = np.asarray(a, dtype=np.uint8) & 1
    support = np.flatnonzero(a)
    if support.size == 0:
        return Fraction(1)
    total = 0
    chunk = 1 << 14
    for start in range(0, 1 << code.dimension, chunk):
        u = np.arange(start, min(start + chunk, 1 << code.dimension), dtype=np.uint64)
        c = codeword_bits(code, u)
        dots = c[:, support].sum(axis=1, dtype=np.int64) & 1
        total += int((1 - 2 * dots).sum())
    return Fraction(total, 1 << code.dimension)

