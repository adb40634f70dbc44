"""Command-line entry points: simulate, bound, coherence."""

from __future__ import annotations

import argparse
import dataclasses
import statistics
import sys

from numpy.random import SeedSequence, default_rng

from . import analysis, design, harness
from .config import load_config
from .errors import HypothesisViolated, RdmudError
from .model import Scenario


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.workers is not None:
        cfg = dataclasses.replace(cfg, workers=args.workers)
    results = harness.run_sweep(cfg, output=args.output)
    out = cfg.output if args.output is None else args.output
    print(f"wrote {len(results)} rows to {out}")
    return 0


_BOUND_HEADER = (
    f"{'M':>5} {'snr_db':>8} {'mu':>10} {'tau':>12} {'rdd':>5} {'rddf':>5} "
    f"{'pe_bound':>12} {'side_ok':>7} {'m_min_rdd':>10} {'m_min_rddf':>10}"
)


def _cmd_bound(args) -> int:
    cfg = load_config(args.config)
    alpha = cfg.alpha if args.alpha is None else args.alpha
    c = cfg.c if args.c is None else args.c
    fixed_cfg = dataclasses.replace(cfg, fresh_a=False)
    gram = harness.build_gram(cfg)
    gains = cfg.gain_vector()
    lines = [_BOUND_HEADER]
    csv_lines = [
        "m,snr_db,mu,tau,rdd_condition_met,rddf_condition_met,pe_bound,"
        "side_condition_ok,m_min_rdd,m_min_rddf"
    ]
    for m in cfg.m_values:
        mat = harness.build_fixed_matrix(fixed_cfg, m)
        for snr in cfg.snr_db:
            sigma = harness.sigma_from_snr_db(snr, min(abs(g) for g in gains))
            scn = Scenario(n=cfg.n, k=cfg.k, gains=gains, gram=gram, a=mat, sigma=sigma)
            report = analysis.check_conditions(scn, alpha)
            mins = {}
            for det in ("rdd", "rddf"):
                try:
                    mins[det] = str(analysis.min_correlators(scn, alpha, c, det).m_min)
                except HypothesisViolated:
                    mins[det] = "n/a"
            lines.append(
                f"{m:>5} {snr:>8.2f} {report.mu:>10.4f} {report.tau:>12.6g} "
                f"{str(report.rdd_condition_met):>5} {str(report.rddf_condition_met):>5} "
                f"{report.pe_bound:>12.6g} {str(report.side_condition_ok):>7} "
                f"{mins['rdd']:>10} {mins['rddf']:>10}"
            )
            csv_lines.append(
                f"{m},{snr!r},{report.mu!r},{report.tau!r},{report.rdd_condition_met},"
                f"{report.rddf_condition_met},{report.pe_bound!r},"
                f"{report.side_condition_ok},{mins['rdd']},{mins['rddf']}"
            )
    print("\n".join(lines))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write("\n".join(csv_lines) + "\n")
        print(f"wrote {len(csv_lines) - 1} rows to {args.csv}")
    return 0


def _cmd_coherence(args) -> int:
    if args.samples < 1:
        raise RdmudError("samples must be >= 1")
    seeds = SeedSequence(args.seed).spawn(args.samples)
    values = [
        design.coherence(design.partial_dft(args.n, args.m, default_rng(s)))
        for s in seeds
    ]
    welch = design.welch_bound(args.n, args.m)
    print(f"n={args.n} m={args.m} seed={args.seed} samples={args.samples}")
    if args.samples == 1:
        print(f"coherence: {values[0]:.6f}")
    else:
        print(
            f"coherence: min={min(values):.6f} median={statistics.median(values):.6f} "
            f"mean={statistics.fmean(values):.6f} max={max(values):.6f}"
        )
    print(f"welch lower bound: {welch:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdmud",
        description="Reduced-dimension multiuser detection simulations and bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo sweep from a config file")
    p_sim.add_argument("--config", required=True, help="path to a sweep config file")
    p_sim.add_argument("--output", default=None, help="override the config's output CSV path")
    p_sim.add_argument("--workers", type=int, default=None, help="override worker count")
    p_sim.set_defaults(func=_cmd_simulate)

    p_bound = sub.add_parser("bound", help="evaluate recovery conditions and error bounds")
    p_bound.add_argument("--config", required=True, help="path to a sweep config file")
    p_bound.add_argument("--alpha", type=float, default=None, help="override config alpha")
    p_bound.add_argument("--c", type=float, default=None, help="override config c")
    p_bound.add_argument("--csv", default=None, help="also write the report as CSV")
    p_bound.set_defaults(func=_cmd_bound)

    p_coh = sub.add_parser("coherence", help="coherence statistics of partial DFT draws")
    p_coh.add_argument("--n", type=int, required=True, help="total column count")
    p_coh.add_argument("--m", type=int, required=True, help="selected row count")
    p_coh.add_argument("--seed", type=int, required=True, help="master seed")
    p_coh.add_argument("--samples", type=int, default=1, help="number of matrices to draw")
    p_coh.set_defaults(func=_cmd_coherence)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RdmudError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
