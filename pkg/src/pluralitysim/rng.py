"""Seedable random streams.

Every stochastic component draws from a Stream identified by (seed,
stream_id).  Identical identifiers reproduce identical draw sequences
across runs and platforms (PCG64 is platform independent), and distinct
stream ids give statistically independent streams.  One stream is owned
by exactly one consumer; streams are never shared across trials.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Stream", "derive_trial_seed", "SUBSTREAM"]

_MASK64 = (1 << 64) - 1

# Conventional stream ids, so the same (seed, trial) always maps to the
# same draw sequences regardless of which engine consumes them.
SUBSTREAM = {
    "init": 0,  # initial opinion assignment
    "engine": 1,  # event kernel / round sampling
    "calibration": 2,  # time-unit and broadcast calibration
    "clustering": 3,  # leader election and retries
}


def derive_trial_seed(seed: int, trial: int) -> int:
    """Expand a base seed into a per-trial seed (splitmix64 finalizer)."""
    z = (seed ^ (0x9E3779B97F4A7C15 * (trial + 1))) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


class Stream:
    """Deterministic random source with buffered scalar draws.

    Scalar draws in the event-engine hot path are served from bulk
    refills of a PCG64 generator; bulk (numpy) draws are exposed
    directly through :attr:`gen`.
    """

    __slots__ = ("seed", "stream_id", "gen", "_exp", "_ei", "_u", "_ui")

    _BUF = 1 << 16

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.gen = np.random.Generator(np.random.PCG64(ss))
        self._exp: list[float] = []
        self._ei = 0
        self._u: list[float] = []
        self._ui = 0

    # -- scalar draws (buffered) -------------------------------------

    def exp1(self) -> float:
        """One standard-exponential draw (rate 1)."""
        i = self._ei
        if i == len(self._exp):
            self._exp = self.gen.standard_exponential(self._BUF).tolist()
            i = 0
        self._ei = i + 1
        return self._exp[i]

    def exponential(self, rate: float) -> float:
        """One exponential draw with the given rate."""
        return self.exp1() / rate

    def u01(self) -> float:
        """One uniform draw in [0, 1)."""
        i = self._ui
        if i == len(self._u):
            self._u = self.gen.random(self._BUF).tolist()
            i = 0
        self._ui = i + 1
        return self._u[i]

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.u01() * n)

    def bernoulli(self, p: float) -> bool:
        return self.u01() < p

    # -- bulk draws ---------------------------------------------------

    def integers(self, n: int, size) -> np.ndarray:
        return self.gen.integers(0, n, size=size)

    def exponentials(self, rate: float, size) -> np.ndarray:
        return self.gen.standard_exponential(size) / rate

    def shuffle(self, values) -> None:
        self.gen.shuffle(values)
