"""End-to-end acceptance checks, one test per criterion."""

from fractions import Fraction
import hashlib
import itertools
import math
import subprocess
import sys

import numpy as np
import pytest

from codespectra.codes import build_apn_code, build_rm1, dual_distance, dual_distance_bruteforce
from codespectra.experiments import (ExperimentConfig, adjacent_inversions, fit_sweep,
                                     run_concentration, run_delta_scaling, run_distance_sweep)
from codespectra.metrics import (ESD, comes_in_pairs, interval_sup_distance, moment_pair_oracle,
                                 moment_quad_oracle)
from codespectra.mplaw import (MPParams, adaptive_simpson, fixed_point_residual, mp_density,
                               mp_stieltjes, sample_domain)
from codespectra.seeding import SplitMix64, mix
from codespectra.specmat import build_sample_matrix, gram_spectrum, run_identity_suite

pytestmark = pytest.mark.slow


def _codewords(code):
    """All codewords as Python ints, by XOR over generator rows."""
    rows = [int("".join(str(b) for b in reversed(r)), 2) for r in code.generator.tolist()]
    words = [0]
    for r in rows:
        words += [w ^ r for w in words]
    return words


def _signed_total(words, idx):
    return sum(-1 if sum((w >> i) & 1 for i in idx) & 1 else 1 for w in words)


def test_criterion_1_exact_moments(acceptance):
    code = build_apn_code(5, 3)
    n = code.length
    assert (n, code.dimension) == (31, 10)
    words = _codewords(code)
    assert len(set(words)) == 1024

    pair_bad = 0
    for j, k in itertools.combinations(range(n), 2):
        v = moment_pair_oracle(code, j, k)
        pair_bad += v != 0 or _signed_total(words, (j, k)) != 0

    rng = SplitMix64(2024)
    nonpair, nonpair_bad = 0, 0
    while nonpair < 2000:
        idx = tuple(int(rng.next_u64() % n) for _ in range(4))
        if comes_in_pairs(*idx):
            continue
        nonpair += 1
        v = moment_quad_oracle(code, *idx)
        nonpair_bad += v != 0 or _signed_total(words, idx) != 0

    pairing = {q for a in range(n) for b in range(n)
               for q in ((a, a, b, b), (a, b, a, b), (a, b, b, a))}
    pair_quad_bad = 0
    for idx in pairing:
        v = moment_quad_oracle(code, *idx)
        ref = Fraction(_signed_total(words, idx), n * n * len(words))
        pair_quad_bad += v != ref or abs(v) > Fraction(1, n * n)
    ok = pair_bad == 0 and nonpair_bad == 0 and pair_quad_bad == 0
    acceptance(1, ok, f"pairs {n * (n - 1) // 2} bad={pair_bad}; non-pairing quads 2000 "
                      f"bad={nonpair_bad}; pairing quads {len(pairing)} bad={pair_quad_bad}")
    assert ok


def test_criterion_2_dual_distance(acceptance):
    results = []
    for label, build, ms, want in (("apn", lambda m: build_apn_code(m, 3), (4, 5, 6), 5),
                                   ("rm1", build_rm1, (3, 4, 5), 4)):
        for m in ms:
            code = build(m)
            d = dual_distance(code)
            brute = None
            if code.length - code.dimension <= 20:
                brute = dual_distance_bruteforce(code)
            results.append((label, m, int(d), brute, want))
    ok = all(d == want and (b is None or b == d) for _, _, d, b, want in results)
    acceptance(2, ok, "; ".join(f"{lab} m={m}: d={d}" + ("" if b is None else f" (brute {b})")
                                for lab, m, d, b, _ in results))
    assert ok


def test_criterion_3_mp_analytics(acceptance):
    ys = (0.1, 0.25, 0.5, 0.75, 0.9)
    worst_mass = 0.0
    for y in ys:
        params = MPParams(y)
        a, b = params.a, params.b
        # integrate the raw density with the edge substitution done here, not the library CDF
        f = lambda t: mp_density(a + (b - a) * math.sin(t) ** 2, params) * (b - a) * math.sin(2 * t)
        mass = adaptive_simpson(f, 0.0, math.pi / 2, 1e-12)
        worst_mass = max(worst_mass, abs(mass - 1.0))

    rng = SplitMix64(3)
    worst_fp = 0.0
    for i in range(100):
        params = MPParams(ys[i % len(ys)])
        pt = sample_domain(params, 10_000, 0.05, 1, rng)[0]
        worst_fp = max(worst_fp, fixed_point_residual(mp_stieltjes(pt.z, params), pt.z, params))

    worst_inv = 0.0
    for y in ys:
        params = MPParams(y)
        for E in np.linspace(params.a, params.b, 41)[1:-1]:
            s = mp_stieltjes(complex(E, 1e-4), params)
            worst_inv = max(worst_inv, abs(s.imag / math.pi - mp_density(E, params)))
    ok = worst_mass < 1e-8 and worst_fp < 1e-12 and worst_inv < 1e-3
    acceptance(3, ok, f"mass err {worst_mass:.2e}; fixed-point {worst_fp:.2e}; "
                      f"inverse {worst_inv:.2e}")
    assert ok


def test_criterion_4_identities(acceptance):
    rows = run_identity_suite(seed=11, instances=100, n_max=64, p_max=32, tau=0.05)
    worst = {k: max(r[k] for r in rows) for k in ("diagonal", "trace", "wald")}
    inter = sum(r["interlacing_delta"] > r["interlacing_bound"] for r in rows)
    sizes_ok = all(r["n"] <= 64 and r["p"] <= 32 for r in rows)
    ok = len(rows) == 100 and sizes_ok and max(worst.values()) < 1e-8 and inter == 0
    acceptance(4, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
               + f"; interlacing violations {inter}")
    assert ok


@pytest.fixture(scope="module")
def apn_sweep():
    cfg = ExperimentConfig("apn", range(5, 11), y=0.5, trials=20, master_seed=1)
    return run_distance_sweep(cfg)


def test_criterion_5_rate_sweep(acceptance, apn_sweep):
    fit = fit_sweep(apn_sweep)
    medians = [r.median for r in apn_sweep]
    inv = adjacent_inversions(medians)
    ok = fit.slope <= -0.25 and fit.r_squared >= 0.9 and inv <= 1
    acceptance(5, ok, f"slope {fit.slope:.3f}, r2 {fit.r_squared:.4f}, inversions {inv}, "
                      "medians " + " ".join(f"{v:.4f}" for v in medians))
    assert ok


def test_criterion_6_negative_control(acceptance, apn_sweep):
    # rm1 has n = 2^m; the control uses the apn n and p for matched shapes
    apn = {r.m: r for r in apn_sweep}
    ratios = {}
    for m in (8, 10):
        code = build_rm1(m)
        p = apn[m].p
        dists = []
        for t in range(20):
            spec = gram_spectrum(build_sample_matrix(code, p, mix(mix(1, m), t)))
            dists.append(interval_sup_distance(ESD.from_spectrum(spec), MPParams(p / code.length)))
        ratios[m] = float(np.median(dists)) / apn[m].median
    ok = all(v >= 3 for v in ratios.values())
    acceptance(6, ok, "rm1/apn median ratio " + ", ".join(f"m={m}: {v:.1f}"
                                                        for m, v in ratios.items()))
    assert ok


def test_criterion_7_concentration(acceptance):
    cfg = ExperimentConfig("apn", (9,), y=0.5, trials=500, master_seed=7)
    rows = run_concentration(cfg, complex(1, 0.5), (0.01, 0.02, 0.05))
    assert all((r.n, r.p) == (511, 255) for r in rows)
    ok = all(r.ok for r in rows)
    acceptance(7, ok, "; ".join(f"r={r.r}: freq {r.frequency:.3f} <= {r.bound:.3f}+{r.slack:.3f}"
                                for r in rows))
    assert ok


def test_criterion_8_delta_scaling(acceptance):
    cfg = ExperimentConfig("apn", (8, 9, 10), y=0.5, trials=1000, master_seed=8)
    rows = run_delta_scaling(cfg, complex(1, 1))
    rel = [r.std_err / r.abs_delta for r in rows]
    ratios = [b.abs_delta / a.abs_delta for a, b in zip(rows, rows[1:])]
    ok = all(e < 0.1 for e in rel) and all(0.3 <= q <= 0.8 for q in ratios)
    acceptance(8, ok, "|Delta| " + " ".join(f"n={r.n}: {r.abs_delta:.3e}" for r in rows)
               + "; rel err " + " ".join(f"{e:.3f}" for e in rel)
               + "; ratios " + " ".join(f"{q:.3f}" for q in ratios))
    assert ok


SEEDED_COMMANDS = [
    ["spectrum", "--m", "6", "--seed", "4", "-o", "{d}/spectrum.csv"],
    ["mp-compare", "--m", "6", "--seed", "4", "-o", "{d}/mp.csv"],
    ["rate-fit", "--m-min", "5", "--m-max", "7", "--trials", "4", "--seed", "4",
     "--json", "{d}/sweep.json", "--csv", "{d}/sweep.csv", "--figure", "{d}/sweep.svg"],
    ["verify-identities", "--seed", "4", "--instances", "20", "-o", "{d}/ids.csv"],
    ["moments-oracle", "--m", "5", "--quads", "50", "--chars", "10", "--seed", "4",
     "-o", "{d}/moments.csv"],
    ["concentration", "--m", "6", "--trials", "200", "--seed", "4", "-o", "{d}/conc.csv"],
    ["delta-scaling", "--m", "5", "6", "--trials", "30", "--seed", "4", "-o", "{d}/delta.csv"],
    ["code-info", "--m", "5", "-o", "{d}/code.json"],
    ["plot", "--m", "6", "--seed", "4", "-o", "{d}/esd.svg"],
]


def _run_all(directory):
    digests = {}
    for cmd in SEEDED_COMMANDS:
        args = [a.format(d=directory) for a in cmd]
        res = subprocess.run([sys.executable, "-m", "codespectra.cli", *args],
                             capture_output=True)
        assert res.returncode == 0, res.stderr.decode()
    for f in sorted(directory.iterdir()):
        digests[f.name] = hashlib.sha256(f.read_bytes()).hexdigest()
    return digests


def test_criterion_9_determinism(acceptance, tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    first.mkdir()
    second.mkdir()
    d1, d2 = _run_all(first), _run_all(second)
    differ = sorted(k for k in d1 if d1[k] != d2.get(k))
    ok = len(d1) == 11 and d1.keys() == d2.keys() and not differ
    acceptance(9, ok, f"{len(d1)} files, differing: {differ or 'none'}")
    assert ok
