"""Binary PSO iteration loop with optional velocity-legacy correction.

One iteration updates every velocity from its inertia-weighted legacy term
plus cognitive and social pulls, optionally clamps it, decides each bit
flip by comparing a fresh uniform draw against the transfer probability,
and - in correction mode - immediately rewrites the stored velocity of
every flipped bit so that it stays expressed relative to the current bit
value. Personal and global bests update on strict improvement only.

Random stream contract (pinned for reproducibility): one PCG64 generator
per run, seeded with ``RunConfig.seed``. Draw order per run: the initial
position coin flips as one (m, d) block, then per iteration the r1 block,
the r2 block, and the jump block, each (m, d).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import ConfigError
from .trace import RunTrace, TraceBuilder
from .transfer import CORRECTION_CLAMP, TransferKind, correct, sigm


@dataclass(frozen=True)
class WSchedule:
    """Inertia weight ramp, linear from ``start`` at iteration 0 to ``end``
    at the final iteration. Constant when start == end."""

    start: float
    end: float

    def __post_init__(self):
        if not (self.start > 0 and self.end > 0):
            raise ConfigError("w schedule endpoints must be positive")

    @classmethod
    def parse(cls, text: str) -> "WSchedule":
        """Accepts "a" (constant) or "a-b" (ramp) notation."""
        parts = text.strip().split("-")
        try:
            if len(parts) == 1:
                w = float(parts[0])
                return cls(w, w)
            if len(parts) == 2:
                return cls(float(parts[0]), float(parts[1]))
        except ValueError:
            pass
        raise ConfigError(f"bad w schedule: {text!r}")

    def __str__(self) -> str:
        if self.start == self.end:
            return f"{self.start:g}"
        return f"{self.start:g}-{self.end:g}"


def w_at(schedule: WSchedule, iteration: int, max_iterations: int) -> float:
    if schedule.start == schedule.end:
        return schedule.start
    if max_iterations < 2:
        raise ConfigError("a w ramp needs at least 2 iterations")
    if not 0 <= iteration < max_iterations:
        raise ValueError(f"iteration {iteration} outside run of {max_iterations}")
    frac = iteration / (max_iterations - 1)
    return schedule.start + (schedule.end - schedule.start) * frac


@dataclass(frozen=True)
class RunConfig:
    kind: TransferKind
    correction_enabled: bool
    w: WSchedule
    vmax: float | None
    c1: float
    c2: float
    swarm_size: int
    dimensions: int
    max_iterations: int
    seed: int

    def __post_init__(self):
        if self.correction_enabled:
            if self.vmax is not None:
                raise ConfigError("correction mode runs without a vmax clamp")
        else:
            if self.vmax is None or not self.vmax > 0:
                raise ConfigError("uncorrected mode needs a positive vmax")
        if self.c1 < 0 or self.c2 < 0:
            raise ConfigError("c1 and c2 must be >= 0")
        if self.swarm_size < 1 or self.dimensions < 1:
            raise ConfigError("swarm_size and dimensions must be >= 1")
        if self.max_iterations < 0:
            raise ConfigError("max_iterations must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 unsigned bits")


class Objective(Protocol):
    """Deterministic fitness over bit-vectors; larger is better.

    ``evaluate_swarm`` takes an (m, d) 0/1 position matrix and returns the
    fitness vector plus the positions to record as bests (identical to the
    input unless the objective repairs infeasible selections).
    """

    dimensions: int

    def evaluate_swarm(self, positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...


class FunctionObjective:
    """Wraps a plain bits -> fitness function as an Objective."""

    def __init__(self, fn, dimensions: int):
        self._fn = fn
        self.dimensions = dimensions

    def evaluate_swarm(self, positions):
        fitness = np.array([self._fn(row) for row in positions], dtype=np.float64)
        return fitness, positions.copy()


@dataclass
class SwarmState:
    positions: np.ndarray        # (m, d) uint8
    velocities: np.ndarray       # (m, d) float64
    pbest_positions: np.ndarray  # (m, d) uint8
    pbest_fitness: np.ndarray    # (m,) float64
    gbest_position: np.ndarray   # (d,) uint8
    gbest_fitness: float
    iteration: int = 0


def update_velocity(v, x, pbest_bit, gbest_bit, w, c1, c2, r1, r2):
    """Single-entry velocity update; the swarm loop applies the same
    arithmetic vectorized."""
    return (w * v + c1 * r1 * (float(pbest_bit) - float(x))
            + c2 * r2 * (float(gbest_bit) - float(x)))


def clamp_velocity(v, vmax):
    if vmax is None:
        return v
    return min(max(v, -vmax), vmax)


def decide_jump(kind: TransferKind, v: float, r: float) -> bool:
    """True means the bit flips (x <- 1 - x)."""
    return r < sigm(kind, v)


def init_swarm(config: RunConfig, objective: Objective,
               rng: np.random.Generator) -> SwarmState:
    """Fair-coin positions, zero velocities, bests from the first evaluation."""
    m, d = config.swarm_size, config.dimensions
    positions = (rng.random((m, d)) < 0.5).astype(np.uint8)
    fitness, stored = objective.evaluate_swarm(positions)
    best = int(np.argmax(fitness))
    return SwarmState(
        positions=positions,
        velocities=np.zeros((m, d)),
        pbest_positions=stored.astype(np.uint8),
        pbest_fitness=fitness.astype(np.float64),
        gbest_position=stored[best].astype(np.uint8).copy(),
        gbest_fitness=float(fitness[best]),
    )


def step_swarm(state: SwarmState, config: RunConfig, objective: Objective,
               rng: np.random.Generator) -> tuple[SwarmState, np.ndarray]:
    """Advance the swarm one iteration in place.

    Returns the state and the per-particle flip counts of the iteration.
    """
    m, d = state.positions.shape
    w = w_at(config.w, state.iteration, config.max_iterations)
    x = state.positions
    xf = x.astype(np.float64)
    r1 = rng.random((m, d))
    r2 = rng.random((m, d))
    v = (w * state.velocities
         + config.c1 * r1 * (state.pbest_positions - xf)
         + config.c2 * r2 * (state.gbest_position[np.newaxis, :] - xf))
    if config.vmax is not None:
        np.clip(v, -config.vmax, config.vmax, out=v)
    else:
        # overflow safeguard; sigm saturates far below this magnitude
        np.clip(v, -CORRECTION_CLAMP, CORRECTION_CLAMP, out=v)
    r = rng.random((m, d))
    flips = r < sigm(config.kind, v)
    x ^= flips
    if config.correction_enabled and flips.any():
        v[flips] = correct(config.kind, v[flips])
    state.velocities = v

    fitness, stored = objective.evaluate_swarm(x)
    improved = fitness > state.pbest_fitness
    state.pbest_positions[improved] = stored[improved]
    state.pbest_fitness[improved] = fitness[improved]
    best = int(np.argmax(state.pbest_fitness))
    if state.pbest_fitness[best] > state.gbest_fitness:
        state.gbest_fitness = float(state.pbest_fitness[best])
        state.gbest_position = state.pbest_positions[best].copy()
    state.iteration += 1
    return state, flips.sum(axis=1)


def run(config: RunConfig, objective: Objective) -> RunTrace:
    """Full run: init, ``max_iterations`` steps, per-iteration trace."""
    if objective.dimensions != config.dimensions:
        raise ConfigError(
            f"objective dimension {objective.dimensions} != "
            f"config dimension {config.dimensions}"
        )
    rng = np.random.Generator(np.random.PCG64(config.seed))
    state = init_swarm(config, objective, rng)
    builder = TraceBuilder(config.dimensions)
    builder.record(state.gbest_fitness,
                   np.zeros(config.swarm_size, dtype=np.int64),
                   state.positions)
    for _ in range(config.max_iterations):
        state, flips = step_swarm(state, config, objective, rng)
        builder.record(state.gbest_fitness, flips, state.positions)
    return builder.build()
