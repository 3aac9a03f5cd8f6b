"""Exact enumeration oracle for the synchronous step.

Used by tests to validate the vectorized engine: for worlds of at most
32 nodes, enumerate all n^2 ordered sample pairs and return the exact
outcome distribution for one node.
"""

from __future__ import annotations

from typing import Sequence

__all__ = ["oracle_sync_step_distribution", "apply_rule"]

MAX_ORACLE_NODES = 32


def apply_rule(
    opinions: Sequence[int],
    gens: Sequence[int],
    v: int,
    a: int,
    b: int,
    scheduled: bool,
    gcap: int,
) -> tuple[int, int]:
    """Outcome (opinion, gen) for node v sampling the ordered pair (a, b)."""
    if gens[b] > gens[a]:
        a, b = b, a
    hi, lo = gens[a], gens[b]
    if (
        scheduled
        and gens[v] <= hi
        and hi == lo
        and opinions[a] == opinions[b]
        and hi + 1 <= gcap
    ):
        return opinions[a], hi + 1
    if hi > gens[v]:
        return opinions[a], hi
    return opinions[v], gens[v]


def oracle_sync_step_distribution(
    opinions: Sequence[int],
    gens: Sequence[int],
    v: int,
    scheduled: bool,
    gcap: int,
) -> dict[tuple[int, int], float]:
    """Exact per-outcome probabilities for node v over all sample pairs."""
    n = len(opinions)
    if n > MAX_ORACLE_NODES:
        raise ValueError(f"oracle enumeration supports n <= {MAX_ORACLE_NODES}, got {n}")
    if len(gens) != n:
        raise ValueError("opinions and gens must have equal length")
    weight = 1.0 / (n * n)
    dist: dict[tuple[int, int], float] = {}
    for a in range(n):
        for b in range(n):
            out = apply_rule(opinions, gens, v, a, b, scheduled, gcap)
            dist[out] = dist.get(out, 0.0) + weight
    return dist
