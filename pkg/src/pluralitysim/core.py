"""Domain types and derived protocol parameters.

Opinions are integers in [0, k); generations are non-negative integers
capped by the configured generation cap.  The functions here compute the
schedule quantities every engine shares: per-generation life-cycle
lengths, the synchronous two-choices round schedule, the generation cap,
and the lower bound on the same-color collision probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .rng import Stream

__all__ = [
    "NodeState",
    "ExperimentConfig",
    "PopulationSnapshot",
    "assign_initial_opinions",
    "generation_lifetime",
    "generation_schedule",
    "generation_cap",
    "p_lower_bound",
]

PROTOCOLS = ("sync", "async-single", "async-multi")


@dataclass(slots=True)
class NodeState:
    """One node's protocol-visible state.

    ``cached_leader_gen``/``cached_leader_prop`` hold the leader view
    from the node's previous completed leader contact (single-leader
    protocol); ``cached_leader_state`` plays the same role for the
    multi-leader phase states.  ``locked`` is true exactly while the
    node waits for channel establishment.
    """

    opinion: int
    gen: int = 0
    locked: bool = False
    cached_leader_gen: int = 0
    cached_leader_prop: bool = False
    cached_leader_state: int = 0
    cluster_leader: Optional[int] = None
    finished: bool = False


@dataclass(slots=True)
class PopulationSnapshot:
    """Per-(generation, opinion) node counts at one point in time."""

    time: float
    counts: dict[tuple[int, int], int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass
class ExperimentConfig:
    """Resolved experiment parameters; fully determines a run."""

    protocol: str = "sync"
    n: int = 1000
    k: int = 2
    alpha0: float = 1.5
    gamma: float = 0.5
    lam: float = 1.0  # channel-latency rate (per time step)
    epsilon: Optional[float] = None  # default 1/log2(n)^2, resolved at run time
    seed: int = 0
    trials: int = 1
    generation_cap: Optional[int] = None  # default derived from (n, alpha0)
    budget: Optional[float] = None  # rounds (sync) or time steps (async)
    # clustering parameters (async-multi); None means derived defaults
    leader_probability: Optional[float] = None
    cluster_target_size: Optional[int] = None
    wait1_threshold: Optional[int] = None
    wait2_threshold: Optional[int] = None
    broadcast_window: float = 5.0
    # harness
    out_dir: Optional[str] = None
    snapshot_interval: float = 0.25
    jobs: int = 1
    trace_hash: bool = False
    calibration_samples: int = 200_000

    def validate(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.k > self.n:
            raise ValueError(f"k must not exceed n (k={self.k}, n={self.n})")
        if self.alpha0 < 1.0:
            raise ValueError(f"alpha0 must be >= 1, got {self.alpha0}")
        if not (0.0 < self.gamma < 1.0):
            raise ValueError(f"gamma must lie strictly inside (0, 1), got {self.gamma}")
        if self.lam <= 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.epsilon is not None and not (0.0 <= self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.trials < 0:
            raise ValueError(f"trials must be non-negative, got {self.trials}")
        if self.snapshot_interval <= 0.0:
            raise ValueError(f"snapshot-interval must be positive, got {self.snapshot_interval}")

    def resolved_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return 1.0 / math.log2(self.n) ** 2

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def assign_initial_opinions(n: int, k: int, alpha0: float, rng: Stream) -> list[int]:
    """Initial opinion per node with multiplicative bias ``alpha0``.

    Opinion 0 receives ceil(n*alpha0/(alpha0+k-1)) nodes; the remainder
    splits as evenly as possible over opinions 1..k-1 with earlier ids
    taking the +1 remainders.  The assignment order is then shuffled.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    if alpha0 < 1.0:
        raise ValueError(f"alpha0 must be >= 1, got {alpha0}")
    dominant = math.ceil(n * alpha0 / (alpha0 + k - 1))
    counts = [dominant]
    if k > 1:
        rest = n - dominant
        base, extra = divmod(rest, k - 1)
        counts.extend(base + (1 if j < extra else 0) for j in range(k - 1))
    opinions = [op for op, c in enumerate(counts) for _ in range(c)]
    rng.shuffle(opinions)
    return opinions


def generation_lifetime(i: int, alpha0: float, k: int, gamma: float) -> float:
    """Rounds needed for generation ``i`` to grow to a gamma-fraction.

    Evaluates
    ``(2 ln(a^(2^(i-1)) + k - 1) - ln(a^(2^i) + k - 1) - ln g) / ln(2 - g) + 2``
    entirely in log space, so enormous powers of alpha0 saturate smoothly
    instead of overflowing.
    """
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie strictly inside (0, 1), got {gamma}")
    if alpha0 <= 1.0:
        raise ValueError(f"alpha0 must exceed 1, got {alpha0}")
    if i < 1:
        raise ValueError(f"generation index must be at least 1, got {i}")
    # L = ln(alpha0^(2^(i-1))); with A = e^L the numerator's first two
    # terms equal 2 ln(A + k - 1) - ln(A^2 + k - 1)
    #           = 2 log1p((k-1) e^-L) - log1p((k-1) e^-2L).
    log_alpha = math.log(alpha0)
    try:
        big_l = math.ldexp(log_alpha, i - 1)
    except OverflowError:
        big_l = math.inf
    km1 = float(k - 1)
    growth = 2.0 * math.log1p(km1 * math.exp(-big_l)) - math.log1p(km1 * math.exp(-2.0 * big_l))
    return (growth - math.log(gamma)) / math.log(2.0 - gamma) + 2.0


def generation_schedule(alpha0: float, k: int, gamma: float, gcap: int) -> list[int]:
    """Two-choices round schedule t_1..t_gcap.

    t_i = ceil(sum_{j<i} X_j) + 1 with X_0 := X_1 (generation 0 is the
    whole population; its life-cycle is the time until generation 1
    exists and grows).
    """
    if gcap < 1:
        raise ValueError(f"generation cap must be at least 1, got {gcap}")
    schedule = []
    acc = 0.0
    for i in range(gcap):
        acc += generation_lifetime(max(i, 1), alpha0, k, gamma)
        schedule.append(math.ceil(acc) + 1)
    return schedule


def generation_cap(n: int, alpha0: float) -> int:
    """Number of generations floor(log2(log2 n / (alpha0 - 1))), at least 1."""
    if alpha0 <= 1.0:
        raise ValueError(f"alpha0 must exceed 1, got {alpha0}")
    ratio = math.log2(n) / (alpha0 - 1.0)
    if ratio <= 1.0:
        return 1
    return max(1, math.floor(math.log2(ratio)))


def p_lower_bound(alpha: float, k: int) -> float:
    """Lower bound on p = sum_j c_j^2 within a generation of bias alpha.

    Attained when all minorities share the same cardinality.
    """
    return (alpha * alpha + k - 1) / (alpha + k - 1) ** 2
