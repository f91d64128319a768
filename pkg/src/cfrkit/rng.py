"""Counter-based random streams: trajectories are a pure function of
(seed, iteration), so runs are reproducible and reference implementations
can share the exact stream."""

from __future__ import annotations

import numpy as np


def run_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def iteration_rng(seed: int, iteration: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed, iteration)))


def pick(rng: np.random.Generator, dist: list[float]) -> int:
    """Sample an index from a small distribution with one uniform draw."""
    u = rng.random()
    acc = 0.0
    last = 0
    for i, p in enumerate(dist):
        if p > 0.0:
            acc += p
            last = i
            if u < acc:
                return i
    return last
