"""Sample matrices, Gram spectra and resolvent-identity checks."""

from dataclasses import dataclass, field

import numpy as np

from .codes import build_apn_code, codeword_bits, psi_map
from .eigen import symmetric_eigenvalues
from .mplaw import MPParams, sample_domain
from .seeding import SplitMix64, mix, mix_array, stream_words

ROW_SEED_RULE = "row l reads stream(mix(master_seed, l)); message = low k bits of word 0"
IID_SEED_RULE = "row l reads stream(mix(master_seed, l)); bit j = bit (j mod 64) of word j // 64"
RESOLVENT_SIZE_CAP = 128
CLAMP_TOL = 1e-8


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    entries: np.ndarray = field(repr=False)
    code_label: str
    master_seed: int
    seed_rule: str = ROW_SEED_RULE

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]

    @property
    def scaled(self):
        """``X = n^(-1/2) Phi``."""
        return self.entries.astype(np.float64) / np.sqrt(self.cols)


@dataclass(frozen=True, eq=False)
class GramSpectrum:
    y: float
    eigenvalues: np.ndarray

    @property
    def p(self):
        return len(self.eigenvalues)


def _freeze(a):
    a.setflags(write=False)
    return a


def build_sample_matrix(code, p, master_seed):
    """``p`` independent uniform rows of psi(C), row ``l`` seeded by ``mix(master_seed, l)``."""
    n = code.length
    if not 1 <= p < n:
        raise ValueError(f"need 1 <= p < n, got p={p}, n={n}")
    seeds = mix_array(master_seed, np.arange(p))
    words = stream_words(seeds, 1)[:, 0]
    messages = words & np.uint64((1 << code.dimension) - 1)
    phi = psi_map(codeword_bits(code, messages))
    return SampleMatrix(_freeze(phi), code.label, master_seed)


def build_iid_matrix(n, p, master_seed):
    """Truly random baseline: i.i.d. fair +/-1 entries."""
    if not 1 <= p < n:
        raise ValueError(f"need 1 <= p < n, got p={p}, n={n}")
    seeds = mix_array(master_seed, np.arange(p))
    nwords = (n + 63) // 64
    words = stream_words(seeds, nwords)
    j = np.arange(n)
    bits = (words[:, j // 64] >> (j % 64).astype(np.uint64)) & np.uint64(1)
    phi = psi_map(bits.astype(np.uint8))
    return SampleMatrix(_freeze(phi), "iid-signs", master_seed, IID_SEED_RULE)


def gram_integer(phi):
    """``Phi Phi^T`` as exact int64 (float64 products of +/-1 are exact below 2^53)."""
    a = phi.entries.astype(np.float64)
    return np.rint(a @ a.T).astype(np.int64)


def gram(phi):
    """``(1/n) Phi Phi^T``."""
    return gram_integer(phi) / phi.cols


def eigenvalues(h, tol=1e-10, method="lapack", y=float("nan")):
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise SpectrumError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if np.max(np.abs(h - h.T), initial=0.0) > tol * scale:
        raise SpectrumError("matrix is not symmetric within tolerance")
    ev = symmetric_eigenvalues(0.5 * (h + h.T), method=method)
    return GramSpectrum(y, _freeze(np.sort(ev)))


def gram_spectrum(phi, method="lapack"):
    """Eigenvalues of the Gram matrix, clamped to be nonnegative and trace-checked."""
    p, n = phi.rows, phi.cols
    ev = np.array(eigenvalues(gram(phi), method=method).eigenvalues)
    if ev[0] < -CLAMP_TOL:
        raise SpectrumError(f"Gram eigenvalue {ev[0]:.3e} is negative")
    ev[ev < 0] = 0.0
    if abs(ev.sum() - p) > 1e-8 * p:
        raise SpectrumError(f"trace {ev.sum()!r} differs from p={p}")
    return GramSpectrum(p / n, _freeze(ev))


def _check_upper(z):
    if complex(z).imag <= 0:
        raise ValueError("need Im z > 0")


def green_trace(spectrum, z):
    """``sum_j 1 / (lambda_j - z)``."""
    _check_upper(z)
    return complex(np.sum(1.0 / (np.asarray(spectrum.eigenvalues) - z)))


# Resolvent checks. X^(T) zeroes the rows in T; G^(T) is the Green function of
# the (p - |T|)-square minor of X X* on the rows outside T, R^(T) the n x n
# Green function of X^(T)* X^(T).

def _small(phi):
    if phi.cols > RESOLVENT_SIZE_CAP:
        raise ValueError(f"resolvent checks are capped at n <= {RESOLVENT_SIZE_CAP}")
    return phi.scaled


def _zeroed(x, removed):
    xt = x.copy()
    xt[sorted(removed), :] = 0.0
    return xt


def _green_minor(x, removed, z):
    keep = [j for j in range(x.shape[0]) if j not in set(removed)]
    xs = x[keep]
    return np.linalg.inv(xs @ xs.T - z * np.eye(len(keep)))


def _green_r(x, removed, z):
    xt = _zeroed(x, removed)
    return np.linalg.inv(xt.T @ xt - z * np.eye(x.shape[1]))


def verify_trace_relation(phi, removed, z):
    """``|Tr G^(T) - Tr R^(T) - (n - (p - |T|)) / z|``."""
    _check_upper(z)
    x = _small(phi)
    removed = set(removed)
    p, n = x.shape
    tg = np.trace(_green_minor(x, removed, z)) if len(removed) < p else 0.0
    tr = np.trace(_green_r(x, removed, z))
    return float(abs(tg - tr - (n - (p - len(removed))) / z))


def verify_diagonal_identity(phi, row, z, removed=()):
    """``|1/G^(T)_ll - (-z - z x_l^T R^(T+l) x_l)|``."""
    _check_upper(z)
    x = _small(phi)
    removed = set(removed)
    if row in removed:
        raise ValueError("row must lie outside T")
    keep = [j for j in range(x.shape[0]) if j not in removed]
    g = _green_minor(x, removed, z)
    lhs = 1.0 / g[keep.index(row), keep.index(row)]
    r = _green_r(x, removed | {row}, z)
    xl = x[row]
    rhs = -z - z * (xl @ r @ xl)
    return float(abs(lhs - rhs))


def verify_wald(phi, removed, j, z):
    """``|sum_k |R^(T)_jk|^2 - Im R^(T)_jj / eta|``."""
    _check_upper(z)
    x = _small(phi)
    r = _green_r(x, set(removed), z)
    lhs = np.sum(np.abs(r[j]) ** 2)
    rhs = r[j, j].imag / complex(z).imag
    return float(abs(lhs - rhs))


def wald_terms(phi, removed, j, z):
    x = _small(phi)
    r = _green_r(x, set(removed), z)
    return float(np.sum(np.abs(r[j]) ** 2)), float(abs(r[j, j]) ** 2)


def verify_interlacing(phi, removed, z):
    """``(|Tr G^(T) - Tr G|, |T| / eta)``."""
    _check_upper(z)
    x = _small(phi)
    removed = set(removed)
    p = x.shape[0]
    tg = np.trace(_green_minor(x, set(), z))
    tgt = np.trace(_green_minor(x, removed, z)) if len(removed) < p else 0.0
    return float(abs(tgt - tg)), len(removed) / complex(z).imag


def run_identity_suite(seed, instances=100, n_max=64, p_max=32, tau=0.05):
    """Randomized resolvent checks on APN-code matrices with ``n <= n_max``.

    Returns a list of dicts, one per instance, holding the three residuals,
    the interlacing delta and its bound.
    """
    degrees = [m for m in range(3, 17) if (1 << m) - 1 <= n_max]
    codes = {m: build_apn_code(m, 3) for m in degrees}
    out = []
    for i in range(instances):
        rng = SplitMix64(mix(seed, i))
        m = degrees[rng.next_u64() % len(degrees)]
        code = codes[m]
        n = code.length
        p = 2 + rng.next_u64() % (min(p_max, n - 1) - 1)
        phi = build_sample_matrix(code, p, rng.next_u64())
        z = sample_domain(MPParams(p / n), n, tau, 1, rng)[0].z
        size = rng.next_u64() % min(4, p)
        removed = set()
        while len(removed) < size:
            removed.add(rng.next_u64() % p)
        free = [j for j in range(p) if j not in removed]
        row = free[rng.next_u64() % len(free)]
        col = rng.next_u64() % n
        delta, bound = verify_interlacing(phi, removed, z)
        out.append({
            "instance": i, "label": code.label, "n": n, "p": p, "z": z,
            "removed": sorted(removed),
            "diagonal": verify_diagonal_identity(phi, row, z, removed),
            "trace": verify_trace_relation(phi, removed, z),
            "wald": verify_wald(phi, removed, col, z),
            "interlacing_delta": delta, "interlacing_bound": bound,
        })
    return out
