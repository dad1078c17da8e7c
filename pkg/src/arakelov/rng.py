"""Counter-based random streams keyed by ``(seed, stream path)``.

No module keeps global random state.  Callers hand an :class:`RngState` to
every stochastic routine and derive independent sub-streams with
:meth:`RngState.spawn`, so results depend only on the key and never on the
order in which work is scheduled.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

SEED_ENV = "ARAKELOV_SEED"


@dataclass(frozen=True)
class RngState:
    seed: int
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def spawn(self, *keys: int) -> "RngState":
        return RngState(self.seed, self.stream + tuple(int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))


def default_seed(fallback: int | None = None) -> int | None:
    value = os.environ.get(SEED_ENV)
    if value is None or value == "":
        return fallback
    return int(value)
