"""Command line front end for the experiment harness.

Subcommands::

    sdcs run             end-to-end quantize/recover sweep (figure 2-7 analogues)
    sdcs sigmamin        smallest-singular-value Monte Carlo (figure 1 analogue)
    sdcs spectral        exact/asymptotic spectral checks for the difference matrix
    sdcs ratedistortion  step-size / bit-budget / distortion table
    sdcs report          summarize an existing CSV and fit log-log slopes

Exit codes: 0 full sweep, 2 if any trial rows failed, 1 on config errors.
``SDCS_THREADS`` overrides ``--threads``.
"""

import argparse
import os
import sys

from . import harness, spectral
from .harness import ExperimentConfig, QuantizerSpec
from .quantize import rate_distortion_plan


def _common_flags(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output CSV path")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--full", action="store_true",
                   help="full-scale grids instead of desk-scale defaults")


def _int_list(s):
    return tuple(int(v) for v in s.split(","))


def build_parser():
    ap = argparse.ArgumentParser(prog="sdcs")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="end-to-end sweep")
    _common_flags(run)
    run.add_argument("--N", type=int, default=1024)
    run.add_argument("--k", type=int, default=10)
    run.add_argument("--m", type=_int_list, default=(100, 200, 300, 400, 500, 600))
    run.add_argument("--r", type=_int_list, default=(0, 1, 2))
    run.add_argument("--delta", type=float, default=0.01)
    run.add_argument("--mu", type=float, default=None,
                     help="use leaky shapers with this leak parameter")
    run.add_argument("--signal-model", choices=("constant", "gaussian"),
                     default="constant")
    run.add_argument("--kprime", type=int, default=None)
    run.add_argument("--trials", type=int, default=50)

    sig = sub.add_parser("sigmamin", help="sigma_min(D^-r E) study")
    _common_flags(sig)
    sig.add_argument("--k", type=int, default=20)
    sig.add_argument("--lambdas", type=_int_list, default=(2, 4, 8, 16, 24))
    sig.add_argument("--r", type=_int_list, default=(1, 2))
    sig.add_argument("--trials", type=int, default=200)

    spec = sub.add_parser("spectral", help="difference-matrix spectral suite")
    _common_flags(spec)
    spec.add_argument("--r", type=_int_list, default=(1, 2, 3, 4))
    spec.add_argument("--m", type=_int_list, default=(16, 64, 256))

    rd = sub.add_parser("ratedistortion", help="bit budget / distortion table")
    _common_flags(rd)
    rd.add_argument("--A", type=float, default=1.0)
    rd.add_argument("--b", type=float, default=0.0)
    rd.add_argument("--alpha", type=float, default=0.75)
    rd.add_argument("--k", type=int, default=10)
    rd.add_argument("--m", type=_int_list, default=(100, 200, 400, 800))
    rd.add_argument("--r", type=_int_list, default=(1, 2, 3))

    rep = sub.add_parser("report", help="summarize a sweep CSV")
    rep.add_argument("csv")
    return ap


def _apply_config_file(args):
    if getattr(args, "config", None):
        for key, val in harness.load_config(args.config).items():
            key = key.replace("-", "_")
            if not hasattr(args, key):
                raise ValueError(f"unknown config key {key!r}")
            cur = getattr(args, key)
            if isinstance(cur, tuple):
                setattr(args, key, _int_list(val))
            elif isinstance(cur, bool):
                setattr(args, key, val.lower() in ("1", "true", "yes"))
            elif isinstance(cur, int):
                setattr(args, key, int(val))
            elif isinstance(cur, float):
                setattr(args, key, float(val))
            elif cur is None:
                # default-less flag (seed, out, ...): guess numeric first
                try:
                    setattr(args, key, int(val))
                except ValueError:
                    setattr(args, key, val)
            else:
                setattr(args, key, val)
    return args


def _print_table(rows, columns):
    widths = [max(len(c), *(len(f"{r[c]}") for r in rows)) for c in columns]
    print("  ".join(c.ljust(w) for c, w in zip(columns, widths)))
    for r in rows:
        print("  ".join(f"{r[c]}".ljust(w) for c, w in zip(columns, widths)))


def cmd_run(args):
    quantizers = []
    for r in args.r:
        if r == 0:
            quantizers.append(QuantizerSpec("identity", 0))
        elif args.mu is not None:
            quantizers.append(QuantizerSpec("leaky", r, args.mu))
        else:
            quantizers.append(QuantizerSpec("difference", r))
    config = ExperimentConfig(
        kind="endtoend", experiment_id="endtoend", n=args.N, k=args.k,
        m_list=args.m, quantizers=tuple(quantizers), delta=args.delta,
        kprime=args.kprime, signal_model=args.signal_model,
        trials=args.trials, seed=args.seed or 0, out=args.out,
    )
    if args.full:
        config = config.at_full_scale()
    records, failures = run_with_errors(config)
    _print_summary(records)
    return 2 if failures else 0


def cmd_sigmamin(args):
    quantizers = tuple(QuantizerSpec("difference", r) for r in args.r)
    config = ExperimentConfig(
        kind="sigmamin", experiment_id="sigmamin", n=args.k, k=args.k,
        m_list=tuple(l * args.k for l in args.lambdas), quantizers=quantizers,
        trials=1000 if args.full else args.trials, seed=args.seed or 0,
        out=args.out,
    )
    records, failures = run_with_errors(config)
    summary = harness.summarize(records)
    for row in summary:
        row["worst_inverse"] = 1.0 / row["sigma_min_min"]
    _print_table(summary, ["r", "k", "m", "lambda", "sigma_min_min",
                           "sigma_min_mean", "worst_inverse"])
    for r in args.r:
        rows = [row for row in summary if row["r"] == r]
        slope, _, _ = harness.fit_loglog_slope(
            [row["lambda"] for row in rows],
            [row["worst_inverse"] for row in rows],
        )
        print(f"r={r}: log-log slope of worst-case 1/sigma_min = {slope:.3f}")
    return 2 if failures else 0


def run_with_errors(config):
    def on_error(key, exc):
        print(f"trial failed {key}: {exc}", file=sys.stderr)
    return harness.run_experiment(config, on_error=on_error)


def _print_summary(records):
    summary = harness.summarize(records)
    _print_table(summary, ["shaper", "r", "k", "m", "lambda", "coarse_mean",
                           "fine_mean", "fine_max", "support_rate", "failed"])


def cmd_spectral(args):
    rows = []
    status = 0
    for r in args.r:
        for m in args.m:
            if m < 4 * r:
                continue
            rank, corner = spectral.commutator_rank_check(r, m)
            weyl = spectral.weyl_sandwich_check(r, m)
            dist = spectral.szego_distribution_check(r, m)
            bounds = spectral.fit_power_law_bounds(r, m)
            ok = rank <= 2 * r and corner == 0 and weyl == 0
            if not ok:
                status = 2
            rows.append({
                "r": r, "m": m, "commutator_rank": rank,
                "corner_violations": corner, "weyl_violations": weyl,
                "szego_sup_dist": f"{dist:.4f}",
                "c1": f"{bounds.c1:.4f}", "c2": f"{bounds.c2:.4f}",
                "ok": ok,
            })
    _print_table(rows, ["r", "m", "commutator_rank", "corner_violations",
                        "weyl_violations", "szego_sup_dist", "c1", "c2", "ok"])
    return status


def cmd_ratedistortion(args):
    rows = []
    for r in args.r:
        for m in args.m:
            plan = rate_distortion_plan(args.A, args.b, r, m, args.k, args.alpha)
            rows.append({
                "r": r, "m": m, "k": args.k, "lambda": plan.oversampling,
                "delta": f"{plan.delta:.5g}", "bits": plan.bits,
                "distortion_sd": f"{plan.distortion_sd:.5g}",
                "distortion_pcm": f"{plan.distortion_pcm:.5g}",
            })
    _print_table(rows, ["r", "m", "k", "lambda", "delta", "bits",
                        "distortion_sd", "distortion_pcm"])
    return 0


def cmd_report(args):
    records = harness.read_csv(args.csv)
    _print_summary(records)
    summary = harness.summarize(records)
    arms = sorted({(row["shaper"], row["r"]) for row in summary})
    for shaper, r in arms:
        rows = [row for row in summary
                if row["shaper"] == shaper and row["r"] == r
                and row["fine_mean"] == row["fine_mean"]]
        if len(rows) < 3:
            continue
        lam = [row["lambda"] for row in rows]
        fine_slope, _, _ = harness.fit_loglog_slope(
            lam, [row["fine_mean"] for row in rows])
        coarse_slope, _, _ = harness.fit_loglog_slope(
            lam, [row["coarse_mean"] for row in rows])
        print(f"{shaper} r={r}: fine-error slope {fine_slope:.3f}, "
              f"coarse-error slope {coarse_slope:.3f}")
    return 0


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args = _apply_config_file(args)
        if getattr(args, "threads", None) is not None:
            os.environ.setdefault("SDCS_THREADS", str(args.threads))
        handler = {
            "run": cmd_run,
            "sigmamin": cmd_sigmamin,
            "spectral": cmd_spectral,
            "ratedistortion": cmd_ratedistortion,
            "report": cmd_report,
        }[args.command]
        return handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
