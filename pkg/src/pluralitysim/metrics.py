"""Snapshot statistics, convergence detection, and bias growth reports.

All functions here are pure: they read a snapshot (or a timeline of
per-generation statistics) and return derived values without touching
engine state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .core import PopulationSnapshot

__all__ = [
    "Convergence",
    "GenerationStats",
    "BiasReport",
    "snapshot_from_arrays",
    "derive_stats",
    "detect_convergence",
    "bias_squaring_report",
]

INF_ALPHA = math.inf  # sentinel bias for monochromatic generations


class Convergence(Enum):
    NONE = "none"
    EPS_CONVERGED = "eps_converged"
    FULL_CONSENSUS = "full_consensus"
    WRONG_WINNER = "wrong_winner"


@dataclass(slots=True)
class GenerationStats:
    """Derived statistics for one non-empty generation."""

    generation: int
    size: int
    g: float  # fraction of all nodes in this generation
    c: dict[int, float]  # color fractions within the generation
    alpha: float  # dominant/second-dominant ratio; inf if monochromatic
    p: float  # sum of squared color fractions
    dominant: int  # dominant color id


@dataclass(slots=True)
class BiasReport:
    """Observed against predicted bias for one generation transition."""

    generation: int
    birth_time: float
    alpha_at_birth: float
    alpha_at_prop: Optional[float]
    predicted_square: Optional[float]
    relative_gap: Optional[float]
    past_threshold: bool
    dominant_fraction: float


def snapshot_from_arrays(time: float, gens, opinions, k: int) -> PopulationSnapshot:
    """Exact per-(generation, opinion) counts from parallel state arrays."""
    gens = np.asarray(gens, dtype=np.int64)
    opinions = np.asarray(opinions, dtype=np.int64)
    if gens.size:
        flat = np.bincount(gens * k + opinions)
    else:
        flat = np.zeros(0, dtype=np.int64)
    counts = {}
    for idx in np.nonzero(flat)[0]:
        counts[(int(idx) // k, int(idx) % k)] = int(flat[idx])
    return PopulationSnapshot(time=time, counts=counts)


def derive_stats(snapshot: PopulationSnapshot) -> dict[int, GenerationStats]:
    """Per-generation fractions, biases, and collision probabilities.

    Empty generations are absent from the result.  A generation whose
    second color has count zero gets the infinite-bias sentinel.
    """
    n = snapshot.total()
    per_gen: dict[int, dict[int, int]] = {}
    for (gen, op), cnt in snapshot.counts.items():
        per_gen.setdefault(gen, {})[op] = cnt
    out: dict[int, GenerationStats] = {}
    for gen, colors in sorted(per_gen.items()):
        size = sum(colors.values())
        ranked = sorted(colors.items(), key=lambda kv: (-kv[1], kv[0]))
        dominant, dom_count = ranked[0]
        second = ranked[1][1] if len(ranked) > 1 else 0
        alpha = dom_count / second if second else INF_ALPHA
        c = {op: cnt / size for op, cnt in colors.items()}
        p = sum(f * f for f in c.values())
        out[gen] = GenerationStats(
            generation=gen, size=size, g=size / n, c=c, alpha=alpha, p=p, dominant=dominant
        )
    return out


def detect_convergence(
    snapshot: PopulationSnapshot, epsilon: float, plurality: int
) -> Convergence:
    """Classify the population against the (1-epsilon) threshold."""
    if not (0.0 <= epsilon < 1.0):
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    n = snapshot.total()
    totals: dict[int, int] = {}
    for (_, op), cnt in snapshot.counts.items():
        totals[op] = totals.get(op, 0) + cnt
    threshold = n - math.floor(epsilon * n)
    for op, cnt in totals.items():
        if cnt >= threshold:
            if op != plurality:
                return Convergence.WRONG_WINNER
            return Convergence.FULL_CONSENSUS if cnt == n else Convergence.EPS_CONVERGED
    return Convergence.NONE


def bias_squaring_report(
    timeline: Sequence[tuple[int, float, float, Optional[float], float]],
    k: int,
) -> list[BiasReport]:
    """Bias-squaring verdicts from a per-generation timeline.

    ``timeline`` rows are (generation, birth_time, alpha_at_birth,
    alpha_at_prop_or_None, dominant_fraction_at_birth), ordered by
    generation.  For each consecutive pair whose earlier bias is finite
    and at most k, the report records the observed next-generation bias
    against the squared prediction.  Generations past the threshold
    (alpha > k, including the infinite sentinel) are marked and carry
    the dominant fraction for monotone-growth checking instead.
    """
    reports: list[BiasReport] = []
    for idx in range(1, len(timeline)):
        gen, birth, alpha, alpha_prop, dom_frac = timeline[idx]
        prev_alpha = timeline[idx - 1][2]
        predicted = None
        gap = None
        past = not math.isfinite(prev_alpha) or prev_alpha > k
        if not past and math.isfinite(alpha):
            predicted = prev_alpha * prev_alpha
            gap = alpha / predicted - 1.0
        reports.append(
            BiasReport(
                generation=gen,
                birth_time=birth,
                alpha_at_birth=alpha,
                alpha_at_prop=alpha_prop,
                predicted_square=predicted,
                relative_gap=gap,
                past_threshold=past,
                dominant_fraction=dom_frac,
            )
        )
    return reports
