"""Seeded Monte Carlo sweeps: distance decay, Delta scaling and concentration."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
import csv
import json
import math
import os

import numpy as np

from .codes import build_apn_code, build_rm1
from .metrics import (ESD, delta_derivative, delta_perturbation, interval_sup_distance,
                      trial_transforms)
from .mplaw import MPParams, mp_stieltjes
from .seeding import mix
from .specmat import build_iid_matrix, build_sample_matrix, gram_spectrum

SCHEMA_VERSION = 1
FAMILIES = ("apn", "rm1", "iid_signs")


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    m_range: tuple
    y: float = 0.5
    trials: int = 20
    master_seed: int = 0
    exponent: int = 3
    tau: float = 0.05
    z_grid: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        object.__setattr__(self, "m_range", tuple(self.m_range))
        for m in self.m_range:
            if not 2 <= m <= 16:
                raise ValueError(f"m={m} outside [2, 16]")
            n = code_length(self.family, m)
            p = choose_p(self.y, n)
            if not 1 <= p < n:
                raise ValueError(f"m={m}: p={p} not in [1, n={n})")


@dataclass
class SweepRecord:
    family: str
    label: str
    m: int
    n: int
    p: int
    y_effective: float
    seeds: list
    distances: list
    median: float = field(init=False)
    iqr: float = field(init=False)

    def __post_init__(self):
        d = np.asarray(self.distances)
        self.median = float(np.median(d))
        q1, q3 = np.percentile(d, [25, 75])
        self.iqr = float(q3 - q1)


@dataclass
class RateFitResult:
    points: list
    slope: float
    intercept: float
    r_squared: float


def code_length(family, m):
    return (1 << m) if family == "rm1" else (1 << m) - 1


def choose_p(y, n):
    """``round(y n)`` with exact halves rounded down."""
    return math.ceil(y * n - 0.5)


def make_sampler(family, m, exponent=3):
    """``(label, n, sampler)`` where ``sampler(p, seed) -> SampleMatrix``."""
    if family == "apn":
        code = build_apn_code(m, exponent)
        return code.label, code.length, lambda p, s: build_sample_matrix(code, p, s)
    if family == "rm1":
        code = build_rm1(m)
        return code.label, code.length, lambda p, s: build_sample_matrix(code, p, s)
    if family == "iid_signs":
        n = code_length(family, m)
        return f"iid-signs-m{m}", n, lambda p, s: build_iid_matrix(n, p, s)
    raise ValueError(f"unknown family {family!r}")


def _map(fn, items, threads):
    if threads == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_distance_sweep(config, threads=None, method="lapack"):
    """One record per m; trial t of degree m uses seed ``mix(mix(master_seed, m), t)``."""
    out = []
    for m in config.m_range:
        label, n, sampler = make_sampler(config.family, m, config.exponent)
        p = choose_p(config.y, n)
        params = MPParams(p / n)
        base = mix(config.master_seed, m)
        seeds = [mix(base, t) for t in range(config.trials)]

        def one(seed):
            spec = gram_spectrum(sampler(p, seed), method=method)
            return interval_sup_distance(ESD.from_spectrum(spec), params)

        dists = _map(one, seeds, threads)
        out.append(SweepRecord(config.family, label, m, n, p, p / n, seeds, dists))
    return out


def fit_loglog_slope(points):
    """Least squares of ``log D`` on ``log n``. ``points`` holds ``(n, D, ...)`` tuples."""
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    n = np.array([pt[0] for pt in points], dtype=np.float64)
    d = np.array([pt[1] for pt in points], dtype=np.float64)
    if np.any(d <= 0):
        raise ValueError("distances must be positive")
    x, y = np.log(n), np.log(d)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    syy = np.sum((y - ym) ** 2)
    r2 = 1.0 if syy == 0 else float(1.0 - np.sum(resid ** 2) / syy)
    return RateFitResult([tuple(pt) for pt in points], slope, intercept, r2)


def fit_sweep(records):
    return fit_loglog_slope([(r.n, r.median, r.iqr) for r in records])


def adjacent_inversions(values):
    return sum(1 for u, v in zip(values, values[1:]) if v > u)


@dataclass
class DeltaRow:
    m: int
    n: int
    p: int
    s_n: complex
    delta: complex
    abs_delta: float
    std_err: float


def run_delta_scaling(config, z, threads=None, exact=False):
    """``|Delta(z)|`` per m from the Monte Carlo mean transform (or the exact MP
    transform when ``exact``); ``y`` is the realized ``p / n``."""
    z = complex(z)
    if z.imag < 0.5:
        raise ValueError("Delta scaling needs Im z >= 0.5")
    rows = []
    for m in config.m_range:
        _, n, sampler = make_sampler(config.family, m, config.exponent)
        p = choose_p(config.y, n)
        params = MPParams(p / n)
        if exact:
            s, se_s = mp_stieltjes(z, params), 0.0
        else:
            v = trial_transforms(sampler, p, [z], config.trials, mix(config.master_seed, m),
                                 threads)[:, 0]
            s = _ordered_mean(v)
            t = len(v)
            se_s = math.sqrt(v.real.var(ddof=1) + v.imag.var(ddof=1)) / math.sqrt(t) if t > 1 else 0.0
        d = delta_perturbation(s, z, params)
        se = abs(delta_derivative(s, z, params)) * se_s
        rows.append(DeltaRow(m, n, p, complex(s), complex(d), abs(d), float(se)))
    return rows


def _ordered_mean(values):
    total = 0j
    for v in values:
        total += v
    return total / len(values)


@dataclass
class ConcentrationRow:
    m: int
    n: int
    p: int
    r: float
    frequency: float
    bound: float
    slack: float

    @property
    def ok(self):
        return self.frequency <= self.bound + self.slack


def concentration_bound(n, p, eta, r):
    return 2.0 * math.exp(-(n * n * eta * eta * r * r) / (8.0 * p))


def run_concentration(config, z, r_grid, threads=None):
    """Exceedance frequencies of ``|s - mean s| >= r`` next to the McDiarmid bound.

    The slack is three binomial standard deviations at the (capped) bound.
    """
    if config.trials < 200:
        raise ValueError("concentration runs need trials >= 200")
    z = complex(z)
    rows = []
    for m in config.m_range:
        _, n, sampler = make_sampler(config.family, m, config.exponent)
        p = choose_p(config.y, n)
        v = trial_transforms(sampler, p, [z], config.trials, mix(config.master_seed, m),
                             threads)[:, 0]
        dev = np.abs(v - _ordered_mean(v))
        t = len(v)
        for r in r_grid:
            freq = float(np.count_nonzero(dev >= r) / t)
            bound = concentration_bound(n, p, z.imag, r)
            q = min(bound, 1.0)
            rows.append(ConcentrationRow(m, n, p, float(r), freq, bound,
                                         3.0 * math.sqrt(q * (1.0 - q) / t)))
    return rows


# persistence

def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (list, tuple)):
        return [_jsonable(o) for o in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def sweep_to_json(config, records, fit=None):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "distance_sweep",
        "config": asdict(config),
        "records": [asdict(r) for r in records],
    }
    if fit is not None:
        doc["fit"] = asdict(fit)
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True)


def write_trial_csv(path, records):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["family", "m", "n", "p", "trial", "seed", "distance"])
        for r in records:
            for t, (seed, d) in enumerate(zip(r.seeds, r.distances)):
                w.writerow([r.family, r.m, r.n, r.p, t, seed, fmt_real(d)])


def fmt_real(x):
    return format(float(x), ".17g")


def default_output_dir():
    return os.environ.get("CODESPECTRA_OUTPUT_DIR", ".")
