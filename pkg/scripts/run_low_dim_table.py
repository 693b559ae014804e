#!/usr/bin/env python3
"""Low-dimension benchmark table (UCI, d=100 by default).

Runs every corrected and uncorrected variant at its best inertia schedule
on one generated instance and prints ratio, convergence round, first
discovery round and mean useless jump volume per variant. CSV artifacts
land in the output directory.
"""

import argparse
import sys

from vcbpso.engine import WSchedule
from vcbpso.harness import (
    ExperimentSpec,
    InstanceSource,
    Variant,
    run_experiment,
)
from vcbpso.transfer import TransferKind

BEST_SCHEDULES = [
    # (kind, correction, w schedule, vmax)
    (TransferKind.VT1, True, "1.0", None),
    (TransferKind.VT2, True, "1.0", None),
    (TransferKind.VT3, True, "1.2-0.99", None),
    (TransferKind.VT4, True, "1.2-0.99", None),
    (TransferKind.VT1, False, "0.6", 5.0),
    (TransferKind.VT2, False, "1.0-0.4", 5.0),
    (TransferKind.VT3, False, "1.0-0.4", 5.0),
    (TransferKind.VT4, False, "1.0-0.4", 5.0),
]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output-dir", default="results/low_dim")
    parser.add_argument("--dimensions", type=int, default=100)
    parser.add_argument("--iterations", type=int, default=1000)
    parser.add_argument("--repetitions", type=int, default=20)
    parser.add_argument("--instance-seed", type=int, default=20260823)
    parser.add_argument("--base-seed", type=int, default=99)
    parser.add_argument("--save-traces", action="store_true")
    args = parser.parse_args(argv)

    spec = ExperimentSpec(
        instance=InstanceSource(instance_type="UCI", n=args.dimensions,
                                r=1000, s=0.5, seed=args.instance_seed),
        variants=[Variant(kind, corr, WSchedule.parse(w), vmax)
                  for kind, corr, w, vmax in BEST_SCHEDULES],
        swarm_size=20,
        c1=2.0,
        c2=2.0,
        iterations=args.iterations,
        repetitions=args.repetitions,
        base_seed=args.base_seed,
        output_dir=args.output_dir,
        save_traces=args.save_traces,
    )
    aggregates = run_experiment(spec)
    print(f"{'variant':<16} {'ratio':>8} {'conv':>8} {'firstdisc':>10} "
          f"{'pujv':>12}")
    for agg in aggregates:
        print(f"{agg.variant.label:<16} {agg.ratio:>8.4f} "
              f"{agg.mean_convergence_round:>8.1f} "
              f"{agg.mean_first_discovery_round:>10.1f} "
              f"{agg.mean_pujv:>12.1f}")
    print(f"\noptimum {aggregates[0].optimum}; artifacts in "
          f"{args.output_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
