"""Post-hoc trace analysis: Hamming activity, effective exploration gain,
useless jump volume, convergence statistics.

Per iteration and particle, ``dist`` is the Hamming distance to the
previous position (raw activity) and ``dist_eff`` the Hamming distance to
the nearest position in the particle's whole history including the initial
one (genuinely new exploration). Their accumulated gap is the particle
useless jump volume (PUJV): movement spent revisiting known space.
"""

from __future__ import annotations

import csv

import numpy as np

from .trace import RunTrace, pack_bits


def hamming(a, b) -> int:
    """Number of differing bits between two equal-length bit-vectors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.bitwise_count(pack_bits(a) ^ pack_bits(b)).sum())


def _check_k(trace: RunTrace, k: int) -> None:
    if not 1 <= k < trace.n_records:
        raise ValueError(f"iteration {k} outside trace of {trace.iterations}")


def dist_iteration(trace: RunTrace, particle: int, k: int) -> int:
    """Hamming distance between the particle's positions at k-1 and k."""
    _check_k(trace, k)
    x = trace.positions[k, particle] ^ trace.positions[k - 1, particle]
    return int(np.bitwise_count(x).sum())


def dist_eff_iteration(trace: RunTrace, particle: int, k: int) -> int:
    """Minimum Hamming distance from the position at k to every earlier
    recorded position of the same particle (history from record 0)."""
    _check_k(trace, k)
    x = trace.positions[:k, particle] ^ trace.positions[k, particle]
    return int(np.bitwise_count(x).sum(axis=-1).min())


def dist_matrix(trace: RunTrace) -> np.ndarray:
    """(iterations, swarm_size) matrix of consecutive Hamming distances;
    row k-1 holds iteration k."""
    x = trace.positions[1:] ^ trace.positions[:-1]
    return np.bitwise_count(x).sum(axis=-1, dtype=np.int64)


def dist_eff_matrix(trace: RunTrace) -> np.ndarray:
    """(iterations, swarm_size) matrix of effective gains, same layout."""
    records, m, words = trace.positions.shape
    out = np.empty((records - 1, m), dtype=np.int64)
    rows = np.arange(records - 1)
    pair = np.empty((records, records), dtype=np.int32)
    for i in range(m):
        pair[:] = 0
        for w in range(words):
            col = np.ascontiguousarray(trace.positions[:, i, w])
            pair += np.bitwise_count(np.bitwise_xor.outer(col, col)).astype(np.int32)
        # min over the history r < k == running column minimum above the diagonal
        cummin = np.minimum.accumulate(pair, axis=0)
        out[:, i] = cummin[rows, rows + 1]
    return out


def pujv(trace: RunTrace, m: int, n: int) -> int:
    """Total useless jump volume over iterations m..n inclusive."""
    if not (1 <= m <= n < trace.n_records):
        raise ValueError(f"bad iteration range [{m}, {n}] for trace of "
                         f"{trace.iterations}")
    d = dist_matrix(trace)[m - 1:n]
    e = dist_eff_matrix(trace)[m - 1:n]
    return int((d - e).sum())


def convergence_round(trace: RunTrace) -> int:
    """Last iteration with a strict gbest improvement; 0 if none."""
    g = trace.gbest_fitness
    better = np.nonzero(g[1:] > g[:-1])[0]
    return int(better[-1] + 1) if better.size else 0


def first_discovery_round(trace: RunTrace) -> int:
    """First iteration at which gbest reaches its final value."""
    g = trace.gbest_fitness
    return int(np.argmax(g == g[-1]))


def write_particle_metrics_csv(trace: RunTrace, path) -> None:
    """Schema: iteration,particle,dist,dist_eff (one row per pair)."""
    d = dist_matrix(trace)
    e = dist_eff_matrix(trace)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["iteration", "particle", "dist", "dist_eff"])
        for k in range(d.shape[0]):
            for i in range(d.shape[1]):
                out.writerow([k + 1, i, int(d[k, i]), int(e[k, i])])


def write_aggregate_metrics_csv(trace: RunTrace, path) -> None:
    """Schema: iteration,mean_dist,mean_dist_eff,cum_pujv."""
    d = dist_matrix(trace)
    e = dist_eff_matrix(trace)
    cum = np.cumsum((d - e).sum(axis=1))
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["iteration", "mean_dist", "mean_dist_eff", "cum_pujv"])
        for k in range(d.shape[0]):
            out.writerow([k + 1, repr(float(d[k].mean())),
                          repr(float(e[k].mean())), int(cum[k])])
