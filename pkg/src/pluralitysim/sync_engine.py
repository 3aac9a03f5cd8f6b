"""Round-synchronous two-choices/propagation engine.

Each round every node samples two uniform nodes (self and duplicates
allowed).  At scheduled rounds a node whose samples share one
generation >= its own and one color promotes itself one generation
above the samples; otherwise it pulls the opinion and generation of the
higher-generation sample.  All updates read the start-of-round state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import ExperimentConfig, assign_initial_opinions, generation_cap, generation_schedule
from .metrics import PopulationSnapshot, snapshot_from_arrays
from .rng import Stream

__all__ = ["SyncWorld", "SyncRunResult", "sync_transition", "sync_step", "run_sync", "default_round_budget"]


@dataclass(slots=True)
class SyncWorld:
    """Mutable round-synchronous population state."""

    opinions: np.ndarray  # int32, shape (n,)
    gens: np.ndarray  # int32, shape (n,)
    schedule: frozenset[int]
    gcap: int
    round: int = 0

    @property
    def n(self) -> int:
        return int(self.opinions.shape[0])


@dataclass(slots=True)
class SyncRunResult:
    winner: Optional[int]
    converged: bool
    rounds: int
    correct: Optional[bool]  # winner == initial plurality; None when not converged
    plurality: int
    schedule: list[int]


def sync_transition(
    opinions: np.ndarray,
    gens: np.ndarray,
    idx1: np.ndarray,
    idx2: np.ndarray,
    scheduled: bool,
    gcap: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Pure one-round state transition given per-node sample indices.

    Samples are ordered so the first has the weakly higher generation
    (swap only on strict inequality, ties keep draw order).  Returns the
    next (opinions, gens); inputs are untouched.
    """
    g1 = gens[idx1]
    g2 = gens[idx2]
    swap = g2 > g1
    got1 = np.where(swap, idx2, idx1)
    o1 = opinions[got1]
    hi = np.where(swap, g2, g1)
    lo = np.where(swap, g1, g2)

    new_ops = opinions.copy()
    new_gens = gens.copy()

    if scheduled:
        o2 = opinions[np.where(swap, idx1, idx2)]
        two = (gens <= hi) & (hi == lo) & (o1 == o2) & (hi + 1 <= gcap)
        prop = ~two & (hi > gens)
    else:
        two = None
        prop = hi > gens

    if two is not None and two.any():
        new_ops[two] = o1[two]
        new_gens[two] = hi[two] + 1
    if prop.any():
        new_ops[prop] = o1[prop]
        new_gens[prop] = hi[prop]
    return new_ops, new_gens


def sync_step(world: SyncWorld, rng: Stream) -> None:
    """Advance the world by one round in place."""
    n = world.n
    idx1 = rng.integers(n, n)
    idx2 = rng.integers(n, n)
    scheduled = (world.round + 1) in world.schedule
    world.opinions, world.gens = sync_transition(
        world.opinions, world.gens, idx1, idx2, scheduled, world.gcap
    )
    world.round += 1


def default_round_budget(n: int, k: int) -> int:
    loglog = math.log2(max(2.0, math.log2(n)))
    return int(50 * (math.log2(max(2, k)) * max(1.0, loglog) + loglog)) + 100


def make_sync_world(config: ExperimentConfig, rng: Stream) -> tuple[SyncWorld, int]:
    """Build the initial world from a config; returns (world, plurality)."""
    opinions = assign_initial_opinions(config.n, config.k, config.alpha0, rng)
    gcap = config.generation_cap
    if gcap is None:
        gcap = generation_cap(config.n, config.alpha0) if config.alpha0 > 1.0 else 1
    if config.alpha0 > 1.0:
        schedule = generation_schedule(config.alpha0, config.k, config.gamma, gcap)
    else:
        # uniform start: no bias to square, promote at a fixed cadence
        schedule = [5 * (i + 1) for i in range(gcap)]
    world = SyncWorld(
        opinions=np.asarray(opinions, dtype=np.int32),
        gens=np.zeros(config.n, dtype=np.int32),
        schedule=frozenset(schedule),
        gcap=gcap,
        round=0,
    )
    return world, 0  # opinion 0 is the initial plurality by construction


def run_sync(
    config: ExperimentConfig,
    rng: Stream,
    metrics_sink: Optional[Callable[[PopulationSnapshot], None]] = None,
) -> SyncRunResult:
    """Run rounds until opinion+generation consensus or budget expiry.

    Emits one snapshot per round (including the initial state) to the
    sink when given.  Budget exhaustion is reported as non-convergence.
    """
    world, plurality = make_sync_world(config, rng)
    budget = int(config.budget) if config.budget is not None else default_round_budget(config.n, config.k)
    schedule = sorted(world.schedule)

    def emit() -> None:
        if metrics_sink is not None:
            metrics_sink(snapshot_from_arrays(float(world.round), world.gens, world.opinions, config.k))

    def settled() -> bool:
        ops = world.opinions
        if ops[0] != ops[-1] or (ops != ops[0]).any():
            return False
        g = world.gens
        return bool(g[0] == g[-1] and not (g != g[0]).any())

    emit()
    converged = settled()
    while not converged and world.round < budget:
        sync_step(world, rng)
        emit()
        converged = settled()

    winner = int(world.opinions[0]) if converged else None
    return SyncRunResult(
        winner=winner,
        converged=converged,
        rounds=world.round,
        correct=(winner == plurality) if converged else None,
        plurality=plurality,
        schedule=schedule,
    )
