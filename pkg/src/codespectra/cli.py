"""Command-line entry point.

Exit codes: 0 success, 1 numerical check failed, 2 usage error.
Relative output paths are resolved against ``$CODESPECTRA_OUTPUT_DIR`` when set.
"""

import argparse
from contextlib import contextmanager
import csv
from fractions import Fraction
import itertools
import json
import os
import sys

import numpy as np

from . import __version__
from .codes import AtLeast, CodeConstructionError, build_apn_code, build_rm1, dual_distance, in_dual
from .experiments import (ExperimentConfig, adjacent_inversions, choose_p, fit_sweep, fmt_real,
                          make_sampler, run_concentration, run_delta_scaling, run_distance_sweep,
                          sweep_to_json, write_trial_csv)
from .metrics import (ESD, cdf_differences, character_sum_oracle, comes_in_pairs,
                      esd_cdf, interval_sup_distance, moment_pair_oracle, moment_quad_oracle)
from .mplaw import MPParams, mp_cdf_sorted, mp_density_array
from .seeding import SplitMix64
from .eigen import EigenConvergenceError
from .specmat import SpectrumError, gram_spectrum, run_identity_suite

RESIDUAL_TOL = 1e-8


class NumericFailure(Exception):
    pass


NUMERIC_ERRORS = (NumericFailure, SpectrumError, EigenConvergenceError, CodeConstructionError,
                  ArithmeticError, np.linalg.LinAlgError)


def _resolve(path):
    if path is None or path == "-" or os.path.isabs(path):
        return path
    base = os.environ.get("CODESPECTRA_OUTPUT_DIR")
    return os.path.join(base, path) if base else path


@contextmanager
def _open_out(path):
    path = _resolve(path)
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _build_code(args):
    if args.family == "apn":
        return build_apn_code(args.m, args.exponent)
    if args.family == "rm1":
        return build_rm1(args.m)
    raise argparse.ArgumentTypeError("this subcommand needs a code family (apn or rm1)")


def _sample(args):
    label, n, sampler = make_sampler(args.family, args.m, args.exponent)
    p = choose_p(args.y, n)
    phi = sampler(p, args.seed)
    return label, n, p, gram_spectrum(phi)


def cmd_code_info(args):
    code = _build_code(args)
    d = dual_distance(code, cap=6)
    desc = code.to_descriptor()
    desc["dual_distance"] = int(d) if not isinstance(d, AtLeast) else str(d)
    with _open_out(args.output) as fh:
        fh.write(json.dumps(desc, indent=2) + "\n")
    return 0


def cmd_check_dual_distance(args):
    code = _build_code(args)
    d = dual_distance(code, cap=max(1, args.at_least - 1))
    ok = d >= args.at_least
    print(f"{code.label}: dual distance {d}; required >= {args.at_least}: {'pass' if ok else 'fail'}")
    return 0 if ok else 1


def cmd_spectrum(args):
    _, _, _, spec = _sample(args)
    with _open_out(args.output) as fh:
        fh.write("eigenvalue\n")
        for v in spec.eigenvalues:
            fh.write(fmt_real(v) + "\n")
    return 0


def _parse_grid(text):
    lo, hi, count = text.split(":")
    return np.linspace(float(lo), float(hi), int(count))


def cmd_mp_compare(args):
    label, n, p, spec = _sample(args)
    params = MPParams(p / n)
    esd = ESD.from_spectrum(spec)
    if args.grid:
        xs = _parse_grid(args.grid)
        f_mp = mp_cdf_sorted(xs, params)
        f_emp = esd_cdf(esd, xs)
        delta = f_emp - f_mp
    else:
        xs, delta, _ = cdf_differences(esd, params)
        f_emp = esd_cdf(esd, xs)
        f_mp = f_emp - delta
    dens = mp_density_array(xs, params)
    dist = interval_sup_distance(esd, params)
    with _open_out(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "density_mp", "F_emp", "F_mp", "delta"])
        for row in zip(xs, dens, f_emp, f_mp, delta):
            w.writerow([fmt_real(v) for v in row])
        w.writerow(["interval_sup_distance", fmt_real(dist)])
    return 0


def _config(args, trials=None):
    return ExperimentConfig(args.family, tuple(range(args.m_min, args.m_max + 1)), args.y,
                            trials or args.trials, args.seed, args.exponent)


def cmd_rate_fit(args):
    config = _config(args)
    records = run_distance_sweep(config, threads=args.threads)
    fit = fit_sweep(records) if len(records) >= 3 else None
    doc = sweep_to_json(config, records, fit)
    if args.json:
        with _open_out(args.json) as fh:
            fh.write(doc + "\n")
    if args.csv:
        write_trial_csv(_resolve(args.csv), records)
    if args.figure and fit is not None:
        from .plotting import plot_rate_fit
        plot_rate_fit(fit, _resolve(args.figure), title=records[0].label.rsplit("-m", 1)[0])
    for r in records:
        print(f"m={r.m} n={r.n} p={r.p} median={r.median:.6g} iqr={r.iqr:.3g}")
    medians = [r.median for r in records]
    print(f"adjacent inversions: {adjacent_inversions(medians)}")
    if fit is not None:
        print(f"slope={fit.slope:.6f} intercept={fit.intercept:.6f} r2={fit.r_squared:.6f}")
    if not args.json:
        print(doc)
    return 0


def cmd_verify_identities(args):
    rows = run_identity_suite(args.seed, instances=args.instances)
    worst = {key: max(r[key] for r in rows) for key in ("diagonal", "trace", "wald")}
    ratio = max((r["interlacing_delta"] / r["interlacing_bound"] for r in rows if r["removed"]),
                default=0.0)
    violations = [r for r in rows if r["interlacing_delta"] > r["interlacing_bound"]]
    if args.output:
        with _open_out(args.output) as fh:
            fh.write("instance,label,n,p,z_re,z_im,removed,diagonal,trace,wald,"
                     "interlacing_delta,interlacing_bound\n")
            for r in rows:
                fh.write(",".join([str(r["instance"]), r["label"], str(r["n"]), str(r["p"]),
                                   fmt_real(r["z"].real), fmt_real(r["z"].imag),
                                   " ".join(map(str, r["removed"]))]
                                  + [fmt_real(r[k]) for k in ("diagonal", "trace", "wald",
                                                              "interlacing_delta",
                                                              "interlacing_bound")]) + "\n")
    for key, v in worst.items():
        print(f"max {key} residual: {v:.3e}")
    print(f"max interlacing delta / bound: {ratio:.6f}")
    print(f"instances: {len(rows)}")
    ok = all(v < RESIDUAL_TOL for v in worst.values()) and not violations
    if not ok:
        raise NumericFailure("resolvent identity check failed")
    return 0


def _fmt_frac(f):
    return f"{f.numerator}/{f.denominator}"


def cmd_moments_oracle(args):
    code = _build_code(args)
    n = code.length
    expect_zero = dual_distance(code, cap=4) >= 5
    failures = 0
    rng = SplitMix64(args.seed)
    with _open_out(args.output) as fh:
        fh.write("kind,indices,value,expected\n")
        if args.pairs == "all":
            pairs = list(itertools.combinations(range(n), 2))
        else:
            pairs = [(rng.next_u64() % n, rng.next_u64() % n) for _ in range(int(args.pairs))]
        for j, k in pairs:
            v = moment_pair_oracle(code, j, k)
            exp = "1/%d" % n if j == k else "0"
            if expect_zero and j != k and v != 0:
                failures += 1
            fh.write(f"pair,{j} {k},{_fmt_frac(v)},{exp}\n")
        for _ in range(args.quads):
            idx = tuple(int(rng.next_u64() % n) for _ in range(4))
            v = moment_quad_oracle(code, *idx)
            paired = comes_in_pairs(*idx)
            if expect_zero and not paired and v != 0:
                failures += 1
            if paired and abs(v) > Fraction(1, n * n):
                failures += 1
            fh.write(f"quad,{' '.join(map(str, idx))},{_fmt_frac(v)},"
                     f"{'<=1/%d' % (n * n) if paired else '0'}\n")
        for _ in range(args.chars):
            w = 1 + rng.next_u64() % 4
            a = np.zeros(n, dtype=np.uint8)
            for _ in range(w):
                a[rng.next_u64() % n] ^= 1
            v = character_sum_oracle(code, a)
            exp = 1 if in_dual(code, a.tolist()) else 0
            if v != exp:
                failures += 1
            fh.write(f"char,{' '.join(map(str, np.flatnonzero(a)))},{_fmt_frac(v)},{exp}\n")
    print(f"{code.label}: d>=5 {expect_zero}; violations {failures}", file=sys.stderr)
    if failures:
        raise NumericFailure(f"{failures} moment conditions violated")
    return 0


def cmd_concentration(args):
    config = ExperimentConfig(args.family, (args.m,), args.y, args.trials, args.seed, args.exponent)
    rows = run_concentration(config, args.z, args.r, threads=args.threads)
    with _open_out(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "n", "p", "r", "frequency", "bound", "slack", "ok"])
        for r in rows:
            w.writerow([r.m, r.n, r.p, fmt_real(r.r), fmt_real(r.frequency), fmt_real(r.bound),
                        fmt_real(r.slack), int(r.ok)])
    if not all(r.ok for r in rows):
        raise NumericFailure("exceedance frequency above bound")
    return 0


def cmd_delta_scaling(args):
    config = ExperimentConfig(args.family, tuple(args.m), args.y, args.trials, args.seed,
                              args.exponent)
    rows = run_delta_scaling(config, args.z, threads=args.threads, exact=args.exact)
    with _open_out(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "n", "p", "s_re", "s_im", "delta_re", "delta_im", "abs_delta",
                    "std_err", "ratio_to_previous"])
        prev = None
        for r in rows:
            ratio = r.abs_delta / prev if prev else float("nan")
            w.writerow([r.m, r.n, r.p] + [fmt_real(v) for v in (
                r.s_n.real, r.s_n.imag, r.delta.real, r.delta.imag, r.abs_delta, r.std_err,
                ratio)])
            prev = r.abs_delta
    return 0


def cmd_plot(args):
    from .plotting import plot_esd
    label, n, p, spec = _sample(args)
    params = MPParams(p / n)
    out = _resolve(args.output)
    edges, heights = plot_esd(spec.eigenvalues, params, out, args.bin_width,
                              title=f"{label}, p={p}, seed={args.seed}")
    area = float(np.sum(heights * np.diff(edges)))
    print(f"wrote {out}; histogram area {area:.12f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="codespectra", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def family(p, families=("apn", "rm1", "iid_signs")):
        p.add_argument("--family", choices=families, default="apn")
        p.add_argument("--exponent", type=int, default=3)

    def matrix(p):
        family(p)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--y", type=float, default=0.5)
        p.add_argument("--seed", type=int, default=0)

    def threads(p):
        p.add_argument("--threads", type=int, default=os.cpu_count())

    p = sub.add_parser("code-info", help="JSON descriptor of a code")
    family(p, ("apn", "rm1"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_code_info)

    p = sub.add_parser("check-dual-distance", help="exit 0 iff the dual distance reaches a threshold")
    family(p, ("apn", "rm1"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--at-least", type=int, default=5)
    p.set_defaults(func=cmd_check_dual_distance)

    p = sub.add_parser("spectrum", help="eigenvalues of one Gram matrix as CSV")
    matrix(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("mp-compare", help="empirical vs MP CDF table and interval distance")
    matrix(p)
    p.add_argument("--grid", help="lo:hi:count evaluation grid (default: the atoms)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mp_compare)

    p = sub.add_parser("rate-fit", help="distance sweep over m and log-log slope")
    family(p)
    p.add_argument("--m-min", type=int, default=5)
    p.add_argument("--m-max", type=int, default=10)
    p.add_argument("--y", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json")
    p.add_argument("--csv")
    p.add_argument("--figure", help="log-log plot path (.svg, .png, .pdf)")
    threads(p)
    p.set_defaults(func=cmd_rate_fit)

    p = sub.add_parser("verify-identities", help="randomized resolvent identity residuals")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("-o", "--output", help="per-instance CSV")
    p.set_defaults(func=cmd_verify_identities)

    p = sub.add_parser("moments-oracle", help="exact pair/quad/character-sum moments")
    family(p, ("apn", "rm1"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--pairs", default="all", help="'all' or a number of random pairs")
    p.add_argument("--quads", type=int, default=200)
    p.add_argument("--chars", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_moments_oracle)

    p = sub.add_parser("concentration", help="exceedance frequencies vs the concentration bound")
    matrix(p)
    p.add_argument("--z", type=complex, default=complex(1, 0.5))
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--r", type=float, nargs="+", default=[0.01, 0.02, 0.05])
    p.add_argument("-o", "--output")
    threads(p)
    p.set_defaults(func=cmd_concentration)

    p = sub.add_parser("delta-scaling", help="|Delta(z)| from the mean transform per m")
    family(p)
    p.add_argument("--m", type=int, nargs="+", required=True)
    p.add_argument("--y", type=float, default=0.5)
    p.add_argument("--z", type=complex, default=complex(1, 1))
    p.add_argument("--trials", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="use the exact MP transform (self-test)")
    p.add_argument("-o", "--output")
    threads(p)
    p.set_defaults(func=cmd_delta_scaling)

    p = sub.add_parser("plot", help="ESD histogram over the MP density")
    matrix(p)
    p.add_argument("--bin-width", type=float)
    p.add_argument("-o", "--output", default="esd.svg")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NUMERIC_ERRORS as exc:
        print(f"codespectra: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (argparse.ArgumentTypeError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"codespectra: error: {exc}", file=sys.stderr)
        return 2

if __name__ == "__main__":
    sys.exit(main())
