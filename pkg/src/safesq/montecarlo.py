"""Reproducible Monte Carlo estimates of the safe fraction.

Trial ``i`` draws from its own PCG64 stream seeded with
``splitmix64(master_seed + (i + 1) * 0x9E3779B97F4A7C15)``, i.e. the i-th
output of a SplitMix64 generator started at ``master_seed``.  Results are
therefore independent of how trials are spread over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import UniverseTooLarge
from .exact import PlacementModel
from .geometry import attack_keys

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MC_CELL_BUDGET = 64_000_000


def splitmix64(x: int) -> int:
    """SplitMix64 finaliser (Steele, Lea and Flood)."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial_index: int) -> int:
    return splitmix64(master_seed + (trial_index + 1) * GOLDEN_GAMMA)


def trial_stream(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(trial_seed(master_seed, trial_index)))


@dataclass(frozen=True)
class TrialConfig:
    model: PlacementModel
    trials: int
    master_seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass
class McResult:
    mean_fraction: float
    sample_variance: float
    standard_error: float
    trials: int
    safe_counts: np.ndarray | None = field(default=None, repr=False)


def sample_placement(model: PlacementModel, stream: np.random.Generator) -> np.ndarray:
    """``p`` distinct linear indices, uniform over all C(N, p) subsets.

    Draws with rejection of repeats when ``p <= N/2`` and otherwise samples
    the complement.
    """
    N, p = model.board.cells, model.p
    if 2 * p > N:
        excluded = _distinct_draws(N, N - p, stream)
        keep = np.ones(N, dtype=bool)
        keep[excluded] = False
        return np.flatnonzero(keep)
    return np.sort(_distinct_draws(N, p, stream))


def _distinct_draws(N: int, count: int, stream: np.random.Generator) -> np.ndarray:
    # first `count` distinct values of an iid uniform sequence
    drawn = np.empty(0, dtype=np.int64)
    while True:
        uniq, first = np.unique(drawn, return_index=True)
        if len(uniq) >= count:
            return drawn[np.sort(first)[:count]]
        need = count - len(uniq)
        extra = stream.integers(0, N, size=need + need // 4 + 1, dtype=np.int64)
        drawn = np.concatenate([drawn, extra])


class Simulator:
    """Precomputed attack keys for one model; ``run`` counts safe cells."""

    def __init__(self, model: PlacementModel):
        if model.board.cells > MC_CELL_BUDGET:
            raise UniverseTooLarge(f"{model.board.cells} cells exceeds the Monte Carlo budget")
        self.model = model
        self.keys = attack_keys(model.piece, model.board)
        self.key_sizes = [int(k.max()) + 1 for k in self.keys]

    def safe_count(self, placement: np.ndarray) -> int:
        N = self.model.board.cells
        if len(placement) == 0:
            return N
        attacked = np.zeros(N, dtype=bool)
        for key, size in zip(self.keys, self.key_sizes):
            used = np.zeros(size, dtype=bool)
            used[key[placement]] = True
            attacked |= used[key]
        return N - int(np.count_nonzero(attacked))

    def run(self, stream: np.random.Generator) -> int:
        return self.safe_count(sample_placement(self.model, stream))


def simulate_once(model: PlacementModel, stream: np.random.Generator) -> int:
    """Safe-cell count of one random configuration."""
    return Simulator(model).run(stream)


def _run_block(sim: Simulator, seed: int, start: int, stop: int) -> np.ndarray:
    return np.array([sim.run(trial_stream(seed, i)) for i in range(start, stop)], dtype=np.int64)


def run_trials(config: TrialConfig, *, workers: int = 1, retain: bool = False) -> McResult:
    """Run independent trials, optionally on a thread pool, aggregating in index order."""
    sim = Simulator(config.model)
    T, N = config.trials, config.model.board.cells
    if workers <= 1:
        counts = _run_block(sim, config.master_seed, 0, T)
    else:
        bounds = np.linspace(0, T, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = pool.map(
                lambda ab: _run_block(sim, config.master_seed, *ab), zip(bounds[:-1], bounds[1:])
            )
            counts = np.concatenate(list(blocks))
    mean = int(counts.sum()) / (T * N)
    var = float(np.var(counts / N, ddof=1)) if T > 1 else 0.0
    return McResult(
        mean_fraction=mean,
        sample_variance=var,
        standard_error=math.sqrt(var / T),
        trials=T,
        safe_counts=counts if retain else None,
    )
