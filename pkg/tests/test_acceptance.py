"""Acceptance gate: ten criteria covering the correction math, the exact
solvers, the exploration metrics and the experimental trends.

Each criterion emits one PASS/FAIL line (echoed in the terminal summary).
Criteria 6-10 share one full-protocol experiment (UCI d=100, m=20,
c1=c2=2, 1000 iterations, 20 repetitions) at each variant's best inertia
schedule; criterion 7 runs the same protocol at d=500.

Criterion 3 is expected to fail for VT3/VT4 at |v| >= 1e3: the true
corrected velocity there is below the smallest positive double, so the
stored value is clamped and the second application cannot recover v. See
the design notes in the repository docs; the identity criterion (1) still
holds at those points because both sides are indistinguishable from 0.
"""

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, ALL_KINDS, velocity_grid
from vcbpso import knapsack, metrics
from vcbpso.engine import WSchedule
from vcbpso.errors import OracleError
from vcbpso.harness import (
    ExperimentSpec,
    InstanceSource,
    Variant,
    run_experiment,
)
from vcbpso.trace import TraceBuilder
from vcbpso.transfer import (
    TransferKind,
    correct,
    correct_oracle,
    sigm,
    sigm_complement,
)

GRID = velocity_grid()

INSTANCE_SEED = 20260823
BASE_SEED = 99

# per-kind best inertia schedules from the low-dimension table (d=100)
BEST_D100 = {
    "corrected": ["1.0", "1.0", "1.2-0.99", "1.2-0.99"],
    "uncorrected": ["0.6", "1.0-0.4", "1.0-0.4", "1.0-0.4"],
}
# and from the scaling table (d=500)
BEST_D500 = {
    "corrected": ["1.0-0.99", "1.0-0.99", "1.1-0.99", "1.1-0.99"],
    "uncorrected": ["0.6", "0.9-0.4", "0.6", "0.9-0.4"],
}


def report(number: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    ACCEPTANCE_LINES.append(f"criterion {number:2d} {name}: {status}{suffix}")
    assert ok, f"criterion {number} {name}{suffix}"


def best_variants(schedules) -> list[Variant]:
    out = []
    for kind, w in zip(ALL_KINDS, schedules["corrected"]):
        out.append(Variant(kind, True, WSchedule.parse(w), None))
    for kind, w in zip(ALL_KINDS, schedules["uncorrected"]):
        out.append(Variant(kind, False, WSchedule.parse(w), 5.0))
    return out


def table_spec(dimensions: int, schedules, output_dir: str,
               compute_metrics: bool) -> ExperimentSpec:
    return ExperimentSpec(
        instance=InstanceSource(instance_type="UCI", n=dimensions, r=1000,
                                s=0.5, seed=INSTANCE_SEED),
        variants=best_variants(schedules),
        swarm_size=20,
        c1=2.0,
        c2=2.0,
        iterations=1000,
        repetitions=20,
        base_seed=BASE_SEED,
        output_dir=output_dir,
        save_traces=False,
        compute_metrics=compute_metrics,
    )


@pytest.fixture(scope="module")
def d100(tmp_path_factory):
    out = tmp_path_factory.mktemp("d100")
    spec = table_spec(100, BEST_D100, str(out), compute_metrics=True)
    aggregates = run_experiment(spec)
    return {a.variant.label: a for a in aggregates}, out


def paired(aggregates, schedules):
    """(kind, corrected aggregate, uncorrected aggregate) per kind."""
    variants = best_variants(schedules)
    out = []
    for i, kind in enumerate(ALL_KINDS):
        corr = aggregates[variants[i].label]
        plain = aggregates[variants[i + len(ALL_KINDS)].label]
        out.append((kind, corr, plain))
    return out


class TestMathCriteria:
    def test_01_correction_identity(self):
        worst = 0.0
        for kind in ALL_KINDS:
            err = np.abs(sigm(kind, correct(kind, GRID))
                         - (1.0 - sigm(kind, GRID)))
            worst = max(worst, float(err.max()))
        report(1, "correction identity", worst <= 1e-10,
               f"max |sigm(correct(v)) - (1-sigm(v))| = {worst:.2e}")

    def test_02_closed_form_vs_oracle(self):
        worst = 0.0
        bad: list[str] = []
        out_of_range: list[str] = []
        for kind in ALL_KINDS:
            for v in GRID:
                v = float(v)
                try:
                    want = correct_oracle(kind, v)
                except OracleError:
                    # only legitimate when the true correction magnitude
                    # is below the double underflow floor, i.e. 1-sigm(v)
                    # itself is unrepresentable
                    if sigm_complement(kind, v) == 0.0:
                        out_of_range.append(f"{kind.value}@{v:g}")
                    else:
                        bad.append(f"{kind.value}@{v:g} oracle failed")
                    continue
                rel = abs(correct(kind, v) - want) / abs(want)
                worst = max(worst, rel)
                if rel > 1e-8:
                    bad.append(f"{kind.value}@{v:g} rel={rel:.2e}")
        detail = f"max rel err {worst:.2e}"
        if out_of_range:
            detail += (f"; {len(out_of_range)} points skipped: true "
                       "correction below double range")
        if bad:
            detail += "; mismatches: " + ", ".join(bad[:6])
        report(2, "closed form vs oracle", not bad, detail)

    def test_03_involution(self):
        bad: list[str] = []
        worst = 0.0
        for kind in ALL_KINDS:
            back = correct(kind, correct(kind, GRID))
            rel = np.abs(back - GRID) / np.abs(GRID)
            worst = max(worst, float(rel.max()))
            for v, r in zip(GRID, rel):
                if r > 1e-8:
                    bad.append(f"{kind.value}@{float(v):g}")
        detail = f"max rel err {worst:.2e}"
        if bad:
            detail += ("; correction underflows double range at: "
                       + ", ".join(bad))
        report(3, "involution", not bad, detail)

    def test_04_dp_vs_brute_force(self):
        rng = np.random.Generator(np.random.PCG64(20260823))
        mismatches = 0
        for i in range(200):
            n = int(rng.integers(1, 21))
            kind = ("UCI", "WCI", "SCI")[i % 3]
            inst = knapsack.generate(kind, n, int(rng.integers(1, 21)) * 10,
                                     float(rng.uniform(0.2, 0.8)),
                                     int(rng.integers(0, 2**32)))
            if knapsack.dp_optimal(inst)[0] != \
                    knapsack.brute_force_optimal(inst):
                mismatches += 1
        report(4, "exact solver oracle", mismatches == 0,
               f"{mismatches} mismatches over 200 instances")

    def test_05_metric_oracle(self):
        rng = np.random.Generator(np.random.PCG64(5))
        mismatches = 0
        additivity_violations = 0
        for _ in range(50):
            d = int(rng.integers(8, 65))
            bits = rng.integers(0, 2, size=(201, 5, d)).astype(np.uint8)
            builder = TraceBuilder(d)
            for pos in bits:
                builder.record(0.0, np.zeros(5, np.int64), pos)
            trace = builder.build()
            eff = metrics.dist_eff_matrix(trace)
            signed = bits.astype(np.int16)
            for i in range(5):
                hist = signed[:, i, :]
                pair = np.abs(hist[:, None, :] - hist[None, :, :]).sum(-1)
                want = [pair[k, :k].min() for k in range(1, 201)]
                if not np.array_equal(eff[:, i], want):
                    mismatches += 1
            q = int(rng.integers(1, 200))
            if metrics.pujv(trace, 1, q) + metrics.pujv(trace, q + 1, 200) \
                    != metrics.pujv(trace, 1, 200):
                additivity_violations += 1
        ok = mismatches == 0 and additivity_violations == 0
        report(5, "metric oracle", ok,
               f"{mismatches} dist_eff mismatches, "
               f"{additivity_violations} additivity violations")


class TestExperimentCriteria:
    def test_06_low_dimension_trend(self, d100):
        aggregates, _ = d100
        lines = []
        ok = True
        for kind, corr, plain in paired(aggregates, BEST_D100):
            lines.append(f"{kind.value}: {corr.ratio:.4f} vs {plain.ratio:.4f}")
            ok = ok and corr.ratio >= 0.985 and plain.ratio < corr.ratio
        report(6, "d=100 ratio trend", ok, "; ".join(lines))

    def test_07_dimensional_scaling(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("d500")
        spec = table_spec(500, BEST_D500, str(out), compute_metrics=False)
        aggregates = {a.variant.label: a
                      for a in run_experiment(spec)}
        pairs = paired(aggregates, BEST_D500)
        gaps = [corr.ratio - plain.ratio for _, corr, plain in pairs]
        mean_gap = float(np.mean(gaps))
        min_corr = min(corr.ratio for _, corr, _ in pairs)
        ok = min_corr >= 0.97 and mean_gap >= 0.04
        report(7, "d=500 scaling trend", ok,
               f"min corrected ratio {min_corr:.4f}, "
               f"mean gap {100 * mean_gap:.2f}pp")

    def test_08_useless_jump_reduction(self, d100):
        aggregates, _ = d100
        lines = []
        ok = True
        for kind, corr, plain in paired(aggregates, BEST_D100):
            lines.append(f"{kind.value}: {corr.mean_pujv:.0f} vs "
                         f"{plain.mean_pujv:.0f}")
            ok = ok and corr.mean_pujv < plain.mean_pujv
        report(8, "useless jump reduction", ok, "; ".join(lines))

    def test_09_first_discovery_ordering(self, d100):
        aggregates, _ = d100
        _, corr, plain = paired(aggregates, BEST_D100)[1]
        a = corr.mean_first_discovery_round
        b = plain.mean_first_discovery_round
        report(9, "first discovery ordering", a < b,
               f"corrected {a:.1f} vs uncorrected {b:.1f}")

    def test_10_pipeline_determinism(self, d100, tmp_path_factory):
        _, first_out = d100
        out = tmp_path_factory.mktemp("d100_repeat")
        run_experiment(table_spec(100, BEST_D100, str(out),
                                  compute_metrics=True))
        first = (first_out / "aggregate.csv").read_bytes()
        second = (out / "aggregate.csv").read_bytes()
        report(10, "pipeline determinism", first == second,
               f"{len(first)} bytes compared")
