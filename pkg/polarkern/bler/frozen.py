from dataclasses import dataclass
from logging import Logger
from time import time
from typing import Optional

import numpy as np
from tqdm import tqdm

from polarkern.bler.channel import ChannelConfig
from polarkern.bler.code import PolarCode, polar_transform, sc_decode_genie
from polarkern.logger import logger
from polarkern.models.binmatrix import BinMatrix
from polarkern.parallel import imap_with_parallel, shard_sizes, spawn_seeds


@dataclass(frozen=True, eq=False)
class FrozenSetEstimate:
    frozen: np.ndarray
    error_counts: np.ndarray
    trials: int

    @property
    def error_rates(self) -> np.ndarray:
        return self.error_counts / self.trials


def select_frozen(error_counts: np.ndarray, n_frozen: int) -> np.ndarray:
    """
    Freezes the `n_frozen` indices with the most errors; ties go to the lower index.
    """

    order = sorted(range(len(error_counts)), key=lambda index: (-int(error_counts[index]), index))
    mask = np.zeros(len(error_counts), dtype=bool)
    mask[order[:n_frozen]] = True
    return mask


class GenieBatchWorker:
    def __init__(self, code: PolarCode, channel: ChannelConfig):
        self.code = code
        self.channel = channel

    def __call__(self, seed_and_size) -> np.ndarray:
        seed, size = seed_and_size
        rng = np.random.default_rng(seed)
        u = rng.integers(0, 2, size=(size, self.code.n))
        codewords = polar_transform(self.code.decoder.kernel_array.astype(np.int64), u)
        llrs = self.channel.llr(self.channel.transmit(codewords, rng))
        return sc_decode_genie(self.code, llrs, u).sum(axis=0)


@logger
class FrozenSetEstimator:
    """
    Monte-Carlo frozen-set construction: random blocks are decoded with a genie that
    corrects every decision, and the n - k indices that fail most often are frozen.
    """

    logger: Logger

    def __init__(self, batch_size: int = 1000, n_processes: int = 1, verbose: bool = True):
        assert batch_size >= 1, "`batch_size` must be a positive integer"
        self.batch_size = batch_size
        self.n_processes = n_processes
        self.verbose = verbose

    def estimate(
        self,
        kernel: BinMatrix,
        m: int,
        k: int,
        ebn0_db: float,
        iters: int,
        seed: Optional[int] = None,
    ) -> FrozenSetEstimate:
        assert iters >= 1, "`iters` must be a positive integer"
        code = PolarCode.from_kernel(kernel, m)
        assert 0 < k <= code.n, f"`k` must lie in 1..{code.n}, got {k}"
        channel = ChannelConfig(ebn0_db, k / code.n)
        sizes = shard_sizes(iters, self.batch_size)
        start_time = time()

        counts = np.zeros(code.n, dtype=np.int64)
        with imap_with_parallel(self.n_processes) as imap:
            for batch_counts in tqdm(
                imap(GenieBatchWorker(code, channel), zip(spawn_seeds(seed, len(sizes)), sizes)),
                desc=f"Frozen set estimation ({ebn0_db} dB)",
                total=len(sizes),
                disable=not self.verbose,
            ):
                counts += batch_counts

        frozen = select_frozen(counts, code.n - k)
        self.logger.info(
            f"Frozen set for n = {code.n}, k = {k} at {ebn0_db} dB from {iters:,} trials "
            f"({time() - start_time:,.1f} seconds)"
        )
        return FrozenSetEstimate(frozen=frozen, error_counts=counts, trials=iters)


def estimate_frozen_set(
    kernel: BinMatrix,
    m: int,
    k: int,
    ebn0_db: float,
    iters: int,
    seed: Optional[int] = None,
    n_processes: int = 1,
) -> np.ndarray:
    estimator = FrozenSetEstimator(n_processes=n_processes, verbose=False)
    return estimator.estimate(kernel, m, k, ebn0_db, iters, seed).frozen
