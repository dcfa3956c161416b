from collections import Counter
from dataclasses import dataclass, field, replace
from functools import partial
from logging import Logger
from time import time
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from polarkern.logger import logger
from polarkern.metrics import Pdp
from polarkern.models.binmatrix import BinMatrix
from polarkern.models.episode import EpisodeOutcome
from polarkern.parallel import imap_with_parallel, shard_sizes, spawn_seeds
from polarkern.search.config import RewardConfig, default_max_steps
from polarkern.search.environment import (
    Initialization,
    env_reset,
    play_episode,
    uniform_policy,
)


@dataclass
class RandomSearchResult:
    ell: int
    iterations: int
    best_kernel: Optional[BinMatrix] = None
    min_complexity: Optional[int] = None
    max_complexity: Optional[int] = None
    spectrum: Counter = field(default_factory=Counter)
    timeouts: int = 0
    dead_ends: int = 0

    @property
    def completed(self) -> int:
        return sum(self.spectrum.values())

    @property
    def truncated(self) -> int:
        return self.timeouts + self.dead_ends

    def merge(self, other: "RandomSearchResult") -> "RandomSearchResult":
        """
        Folds the result of a later shard into this one. On equal minima the kernel
        found first is kept.
        """

        self.iterations += other.iterations
        self.timeouts += other.timeouts
        self.dead_ends += other.dead_ends
        self.spectrum.update(other.spectrum)
        if other.min_complexity is not None and (
            self.min_complexity is None or other.min_complexity < self.min_complexity
        ):
            self.min_complexity = other.min_complexity
            self.best_kernel = other.best_kernel
        if other.max_complexity is not None and (
            self.max_complexity is None or other.max_complexity > self.max_complexity
        ):
            self.max_complexity = other.max_complexity
        return self

    def to_json(self) -> dict:
        return {
            "l": self.ell,
            "iterations": self.iterations,
            "min": self.min_complexity,
            "max": self.max_complexity,
            "truncated": {"timeout": self.timeouts, "dead_end": self.dead_ends},
            "best_kernel": self.best_kernel.to_strings() if self.best_kernel else None,
            "spectrum": {str(complexity): count for complexity, count in sorted(self.spectrum.items())},
        }

    def spectrum_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            sorted(self.spectrum.items()), columns=["complexity", "count"]
        )


def run_shard(
    seed: np.random.SeedSequence,
    iterations: int,
    ell: int,
    target: Pdp,
    initialization: Initialization,
    config: RewardConfig,
) -> RandomSearchResult:
    rng = np.random.default_rng(seed)
    policy = uniform_policy(rng)
    result = RandomSearchResult(ell=ell, iterations=iterations)
    for _ in range(iterations):
        episode = play_episode(env_reset(ell, target, initialization, config, rng), policy)
        if episode.outcome == EpisodeOutcome.DEAD_END:
            result.dead_ends += 1
            continue
        if not episode.is_complete:
            result.timeouts += 1
            continue
        complexity = episode.final_complexity
        assert complexity is not None
        result.spectrum[complexity] += 1
        if result.min_complexity is None or complexity < result.min_complexity:
            result.min_complexity = complexity
            result.best_kernel = episode.final_kernel
        if result.max_complexity is None or complexity > result.max_complexity:
            result.max_complexity = complexity
    return result


@logger
class RandomAgent:
    """
    Builds kernels by drawing uniformly among the legal actions of the construction
    game and keeps track of the RMLD complexities of the completed kernels.

    Iterations are split into shards of `shard_size`, each with its own seed stream,
    so results do not depend on `n_processes`.
    """

    logger: Logger

    def __init__(
        self,
        n_processes: int = 1,
        shard_size: int = 100,
        # Episodes longer than this are abandoned; None uses 10x the default game length
        max_steps: Optional[int] = None,
        verbose: bool = True,
    ):
        assert n_processes >= 1, "`n_processes` must be a positive integer"
        assert shard_size >= 1, "`shard_size` must be a positive integer"
        self.n_processes = n_processes
        self.shard_size = shard_size
        self.max_steps = max_steps
        self.verbose = verbose

    def search(
        self,
        ell: int,
        target: Pdp,
        iterations: int,
        initialization: Optional[Initialization] = None,
        config: Optional[RewardConfig] = None,
        seed: Optional[int] = None,
    ) -> RandomSearchResult:
        assert iterations >= 1, "`iterations` must be a positive integer"
        initialization = initialization or Initialization.none()
        config = replace(
            config or RewardConfig.for_size(ell),
            max_steps=self.max_steps or 10 * default_max_steps(ell),
        )
        sizes = shard_sizes(iterations, self.shard_size)
        seeds = spawn_seeds(seed, len(sizes))
        start_time = time()

        result = RandomSearchResult(ell=ell, iterations=0)
        worker = partial(
            _run_shard_star, ell=ell, target=target, initialization=initialization, config=config
        )
        with imap_with_parallel(self.n_processes) as imap:
            for shard_result in tqdm(
                imap(worker, zip(seeds, sizes)),
                desc=f"Random agent search (l = {ell})",
                total=len(sizes),
                disable=not self.verbose,
            ):
                result.merge(shard_result)

        self.logger.info(
            f"Random agent (l = {ell}): {result.completed:,} kernels completed, "
            f"{result.truncated:,} truncated ({result.timeouts:,} timeouts, {result.dead_ends:,} dead ends), "
            f"complexity min {result.min_complexity} / max {result.max_complexity}"
        )
        if result.spectrum:
            complexities = np.repeat(list(result.spectrum), list(result.spectrum.values()))
            self.logger.info(
                f"Complexity spectrum: {np.mean(complexities):.1f} mean, {np.median(complexities):.1f} median"
            )
        self.logger.info(f"Random agent search took {time() - start_time:,.1f} seconds")
        return result


def _run_shard_star(seed_and_size, **kwargs) -> RandomSearchResult:
    seed, size = seed_and_size
    return run_shard(seed, size, **kwargs)


def random_agent_search(
    ell: int,
    target: Pdp,
    iterations: int,
    initialization: Optional[Initialization] = None,
    seed: Optional[int] = None,
    n_processes: int = 1,
    verbose: bool = False,
) -> RandomSearchResult:
    agent = RandomAgent(n_processes=n_processes, verbose=verbose)
    return agent.search(ell, target, iterations, initialization, seed=seed)
