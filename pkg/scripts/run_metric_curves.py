#!/usr/bin/env python3
"""Exploration curves for one corrected/uncorrected pair.

Emits per-iteration mean Hamming activity, effective gain and cumulative
useless jump volume for a single transfer kind, both with and without
velocity correction, at their usual best schedules. The two
``metrics_*.csv`` files are the plottable analog of the jump-volume area
comparison.
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

SCHEDULES = {
    TransferKind.VT1: ("1.0", "0.6"),
    TransferKind.VT2: ("1.0", "1.0-0.4"),
    TransferKind.VT3: ("1.2-0.99", "1.0-0.4"),
    TransferKind.VT4: ("1.2-0.99", "1.0-0.4"),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", default="VT2",
                        choices=[k.value for k in TransferKind])
    parser.add_argument("--output-dir", default="results/curves")
    parser.add_argument("--dimensions", type=int, default=100)
    parser.add_argument("--iterations", type=int, default=1000)
    parser.add_argument("--repetitions", type=int, default=5)
    parser.add_argument("--instance-seed", type=int, default=20260823)
    parser.add_argument("--base-seed", type=int, default=99)
    args = parser.parse_args(argv)

    kind = TransferKind(args.kind)
    w_corr, w_plain = SCHEDULES[kind]
    spec = ExperimentSpec(
        instance=InstanceSource(instance_type="UCI", n=args.dimensions,
                                r=1000, s=0.5, seed=args.instance_seed),
        variants=[
            Variant(kind, True, WSchedule.parse(w_corr), None),
            Variant(kind, False, WSchedule.parse(w_plain), 5.0),
        ],
        swarm_size=20,
        c1=2.0,
        c2=2.0,
        iterations=args.iterations,
        repetitions=args.repetitions,
        base_seed=args.base_seed,
        output_dir=args.output_dir,
        save_traces=False,
    )
    aggregates = run_experiment(spec)
    for agg in aggregates:
        print(f"{agg.variant.label}: ratio {agg.ratio:.4f}, "
              f"total mean PUJV {agg.mean_pujv:.1f}")
    print(f"curves written to {args.output_dir}/metrics_<variant>.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
