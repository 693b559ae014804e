"""Exploration metrics: raw and effective Hamming movement, useless jump
volume, convergence statistics."""

import csv

import numpy as np
import pytest

from test_trace import build_trace
from vcbpso import metrics
from vcbpso.metrics import (
    convergence_round,
    dist_eff_iteration,
    dist_eff_matrix,
    dist_iteration,
    dist_matrix,
    first_discovery_round,
    hamming,
    pujv,
)


def bits(text):
    return np.array([int(c) for c in text], dtype=np.uint8)


def single_particle_trace(*rows, gbest=None):
    return build_trace([[bits(r)] for r in rows], gbest=gbest)


def random_trace(rng, records, m, d):
    pos = rng.integers(0, 2, size=(records, m, d)).astype(np.uint8)
    return build_trace(list(pos))


def dist_eff_bruteforce(trace, particle, k):
    """Quadratic scan over the unpacked history; independent oracle."""
    here = trace.position_bits(k, particle)
    return min(
        int(np.abs(here.astype(int)
                   - trace.position_bits(r, particle).astype(int)).sum())
        for r in range(k)
    )


class TestHamming:
    def test_examples(self):
        assert hamming(bits("0000"), bits("0000")) == 0
        assert hamming(bits("1100"), bits("0011")) == 4
        assert hamming(bits("1100"), bits("0000")) == 2

    def test_mismatch(self):
        with pytest.raises(ValueError):
            hamming(bits("110"), bits("1100"))

    def test_wide_vectors(self):
        rng = np.random.Generator(np.random.PCG64(1))
        a = rng.integers(0, 2, 500).astype(np.uint8)
        b = rng.integers(0, 2, 500).astype(np.uint8)
        assert hamming(a, b) == int(np.abs(a.astype(int) - b.astype(int)).sum())


class TestDist:
    def test_unchanged_is_zero(self):
        t = single_particle_trace("0000", "0000")
        assert dist_iteration(t, 0, 1) == 0

    def test_single_flip(self):
        t = single_particle_trace("0000", "0001")
        assert dist_iteration(t, 0, 1) == 1

    def test_two_flips(self):
        t = single_particle_trace("0000", "1100")
        assert dist_iteration(t, 0, 1) == 2

    def test_out_of_range(self):
        t = single_particle_trace("0000", "1100")
        for k in (0, 2, -1):
            with pytest.raises(ValueError):
                dist_iteration(t, 0, k)
            with pytest.raises(ValueError):
                dist_eff_iteration(t, 0, k)


class TestDistEff:
    def test_single_history(self):
        t = single_particle_trace("0000", "1100")
        assert dist_eff_iteration(t, 0, 1) == 2

    def test_min_over_history(self):
        t = single_particle_trace("0000", "1100", "0011")
        assert dist_eff_iteration(t, 0, 2) == 2

    def test_revisit_is_zero(self):
        t = single_particle_trace("0000", "1100", "0000")
        assert dist_eff_iteration(t, 0, 2) == 0

    def test_initial_position_counts_as_history(self):
        t = single_particle_trace("1111", "0000", "1110")
        assert dist_eff_iteration(t, 0, 2) == 1

    def test_bounded_by_dist(self):
        rng = np.random.Generator(np.random.PCG64(3))
        t = random_trace(rng, 50, 4, 40)
        for k in range(1, 50):
            for i in range(4):
                assert dist_eff_iteration(t, i, k) <= dist_iteration(t, i, k)

    def test_matrices_match_scalars(self):
        rng = np.random.Generator(np.random.PCG64(4))
        t = random_trace(rng, 30, 3, 130)
        d = dist_matrix(t)
        e = dist_eff_matrix(t)
        assert d.shape == e.shape == (29, 3)
        for k in range(1, 30):
            for i in range(3):
                assert d[k - 1, i] == dist_iteration(t, i, k)
                assert e[k - 1, i] == dist_eff_iteration(t, i, k)

    def test_matches_bruteforce_oracle(self):
        rng = np.random.Generator(np.random.PCG64(5))
        t = random_trace(rng, 40, 2, 64)
        e = dist_eff_matrix(t)
        for k in range(1, 40):
            for i in range(2):
                assert e[k - 1, i] == dist_eff_bruteforce(t, i, k)


class TestPujv:
    def test_nearest_is_previous_gives_zero(self):
        # each step flips one fresh bit, so the previous position is
        # always the nearest history point
        t = single_particle_trace("0000", "1000", "1100", "1110")
        assert pujv(t, 1, 3) == 0

    def test_oscillation(self):
        t = single_particle_trace("0000", "1100", "0000", "1100", "0000")
        assert pujv(t, 1, 4) == 3 * 2

    def test_two_step_example(self):
        t = single_particle_trace("0000", "1100", "0011")
        assert pujv(t, 1, 2) == (2 - 2) + (4 - 2)

    def test_nonnegative_and_additive(self):
        rng = np.random.Generator(np.random.PCG64(6))
        t = random_trace(rng, 60, 3, 50)
        total = pujv(t, 1, 59)
        assert total >= 0
        for q in (1, 17, 30, 58):
            assert pujv(t, 1, q) + pujv(t, q + 1, 59) == total

    def test_bad_range(self):
        t = single_particle_trace("00", "01")
        for m, n in ((0, 1), (1, 2), (2, 1)):
            with pytest.raises(ValueError):
                pujv(t, m, n)


class TestConvergenceStats:
    def _trace_with_gbest(self, values):
        rows = [[bits("0")]] * len(values)
        return build_trace(rows, gbest=list(values))

    def test_constant_gbest(self):
        t = self._trace_with_gbest([5.0, 5.0, 5.0])
        assert convergence_round(t) == 0
        assert first_discovery_round(t) == 0

    def test_single_improvement(self):
        g = [1.0] * 18 + [2.0, 2.0, 2.0]
        t = self._trace_with_gbest(g)
        assert convergence_round(t) == 18
        assert first_discovery_round(t) == 18

    def test_multiple_improvements(self):
        g = [0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0]
        t = self._trace_with_gbest(g)
        assert convergence_round(t) == 5
        assert first_discovery_round(t) == 5

    def test_first_discovery_before_convergence_is_impossible(self):
        rng = np.random.Generator(np.random.PCG64(8))
        for _ in range(20):
            g = np.maximum.accumulate(rng.random(30))
            t = self._trace_with_gbest(list(g))
            assert first_discovery_round(t) <= convergence_round(t) \
                or convergence_round(t) == 0


class TestCsvWriters:
    def test_particle_csv_schema(self, tmp_path):
        t = single_particle_trace("0000", "1100", "0011")
        path = tmp_path / "particle.csv"
        metrics.write_particle_metrics_csv(t, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iteration", "particle", "dist", "dist_eff"]
        assert rows[1] == ["1", "0", "2", "2"]
        assert rows[2] == ["2", "0", "4", "2"]

    def test_aggregate_csv_schema(self, tmp_path):
        t = single_particle_trace("0000", "1100", "0011")
        path = tmp_path / "agg.csv"
        metrics.write_aggregate_metrics_csv(t, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iteration", "mean_dist", "mean_dist_eff",
                           "cum_pujv"]
        assert rows[1] == ["1", "2.0", "2.0", "0"]
        assert rows[2] == ["2", "4.0", "2.0", "2"]
