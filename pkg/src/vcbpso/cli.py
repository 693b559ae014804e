"""Batch command line: instance generation, exact solving, experiment
execution, metric extraction and report consolidation."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from collections import defaultdict

import numpy as np

from . import harness, knapsack, metrics
from .errors import ConfigError, OracleError, ResourceError
from .trace import RunTrace


def _cmd_gen(args) -> int:
    instance = knapsack.generate(args.type, args.n, args.r, args.s, args.seed)
    knapsack.save_instance(instance, args.out)
    print(f"wrote {instance.instance_type} instance: n={instance.n} "
          f"capacity={instance.capacity} -> {args.out}")
    return 0


def _cmd_solve(args) -> int:
    instance = knapsack.load_instance(args.instance)
    profit, selection = knapsack.dp_optimal(instance)
    out = args.out or args.instance + ".sol"
    with open(out, "w") as fh:
        fh.write("".join(str(int(b)) for b in selection) + "\n")
    print(profit)
    return 0


def _cmd_run(args) -> int:
    with open(args.config) as fh:
        spec = harness.parse_config(fh.read())
    aggregates = harness.run_experiment(spec)
    for agg in aggregates:
        print(f"{agg.variant.label}: mean profit {agg.mean_best_profit:.2f} "
              f"({100 * agg.ratio:.1f}% of optimum {agg.optimum})")
    return 0


def _cmd_metrics(args) -> int:
    trace = RunTrace.load(args.trace)
    lo = args.from_iteration if args.from_iteration is not None else 1
    hi = args.to_iteration if args.to_iteration is not None else trace.iterations
    base = args.trace
    for suffix in (".gz", ".txt"):
        if base.endswith(suffix):
            base = base[: -len(suffix)]
    metrics.write_particle_metrics_csv(trace, base + "_particle_metrics.csv")
    metrics.write_aggregate_metrics_csv(trace, base + "_aggregate_metrics.csv")
    print(metrics.pujv(trace, lo, hi))
    return 0


def _cmd_report(args) -> int:
    runs_path = os.path.join(args.results_dir, "runs.csv")
    with open(runs_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError(f"{runs_path}: no run rows")
    by_variant: dict[str, list[dict]] = defaultdict(list)
    for row in rows:
        by_variant[row["variant"]].append(row)
    out = csv.writer(sys.stdout)
    out.writerow(["variant", "ratio", "mean_convergence_round",
                  "mean_first_discovery_round", "mean_pujv"])
    for variant, vrows in by_variant.items():
        ratio = float(np.mean([float(r["ratio"]) for r in vrows]))
        conv = float(np.mean([int(r["convergence_round"]) for r in vrows]))
        disc = float(np.mean([int(r["first_discovery_round"]) for r in vrows]))
        pujvs = [int(r["pujv"]) for r in vrows if r["pujv"] != ""]
        mean_pujv = repr(float(np.mean(pujvs))) if pujvs else ""
        out.writerow([variant, repr(ratio), repr(conv), repr(disc), mean_pujv])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vcbpso",
        description="V-shaped binary PSO benchmarks with velocity-legacy "
                    "correction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a knapsack instance file")
    gen.add_argument("--type", required=True, choices=["uci", "wci", "sci"])
    gen.add_argument("--n", required=True, type=int)
    gen.add_argument("--r", required=True, type=int)
    gen.add_argument("--s", required=True, type=float)
    gen.add_argument("--seed", required=True, type=int)
    gen.add_argument("--out", required=True)
    gen.set_defaults(fn=_cmd_gen)

    solve = sub.add_parser("solve", help="print the DP optimum of an instance")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--out", help="selection file (default <instance>.sol)")
    solve.set_defaults(fn=_cmd_solve)

    runp = sub.add_parser("run", help="execute an experiment config")
    runp.add_argument("--config", required=True)
    runp.set_defaults(fn=_cmd_run)

    met = sub.add_parser("metrics", help="emit metric CSVs for a trace")
    met.add_argument("--trace", required=True)
    met.add_argument("--from", dest="from_iteration", type=int)
    met.add_argument("--to", dest="to_iteration", type=int)
    met.set_defaults(fn=_cmd_metrics)

    rep = sub.add_parser("report", help="consolidated table from runs.csv")
    rep.add_argument("--results-dir", required=True)
    rep.set_defaults(fn=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ResourceError, OracleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
