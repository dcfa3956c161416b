from dataclasses import dataclass
from logging import Logger
from time import time
from typing import NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from polarkern.bler.channel import ChannelConfig
from polarkern.bler.code import PolarCode, encode, sc_decode
from polarkern.logger import logger
from polarkern.parallel import imap_with_parallel, shard_sizes, spawn_seeds


class BlerResult(NamedTuple):
    ebn0_db: float
    bler: float
    trials: int
    errors: int


def bler_frame(results: Sequence[BlerResult]) -> pd.DataFrame:
    return pd.DataFrame(list(results), columns=list(BlerResult._fields))


@dataclass(frozen=True, eq=False)
class BlerBatchWorker:
    code: PolarCode
    channel: ChannelConfig

    def __call__(self, seed_and_size) -> tuple[int, int]:
        seed, size = seed_and_size
        rng = np.random.default_rng(seed)
        info = rng.integers(0, 2, size=(size, self.code.k))
        received = self.channel.transmit(encode(self.code, info), rng)
        decoded, _ = sc_decode(self.code, self.channel.llr(received))
        return size, int(np.count_nonzero(np.any(decoded != info, axis=1)))


@logger
class BlerSimulator:
    """
    Monte-Carlo block error rate of a polar code over BPSK / AWGN.

    Trials run in batches of `batch_size`; batch j of SNR point p draws from the j-th
    child of the seed stream keyed by p, and batches are consumed in order, so the
    counts do not depend on `n_processes`.
    """

    logger: Logger

    def __init__(self, batch_size: int = 1000, n_processes: int = 1, verbose: bool = True):
        assert batch_size >= 1, "`batch_size` must be a positive integer"
        self.batch_size = batch_size
        self.n_processes = n_processes
        self.verbose = verbose

    def simulate_point(
        self,
        code: PolarCode,
        ebn0_db: float,
        max_iters: int,
        max_errors: Optional[int] = None,
        seed: Optional[int] = None,
        point: int = 0,
    ) -> BlerResult:
        assert max_iters >= 1, "`max_iters` must be a positive integer"
        channel = ChannelConfig(ebn0_db, code.rate)
        sizes = shard_sizes(max_iters, self.batch_size)
        worker = BlerBatchWorker(code, channel)
        trials = errors = 0

        with imap_with_parallel(self.n_processes) as imap:
            for size, batch_errors in tqdm(
                imap(worker, zip(spawn_seeds(seed, len(sizes), point), sizes)),
                desc=f"BLER at {ebn0_db} dB",
                total=len(sizes),
                disable=not self.verbose,
            ):
                trials += size
                errors += batch_errors
                if max_errors is not None and errors >= max_errors:
                    break
        return BlerResult(ebn0_db=ebn0_db, bler=errors / trials, trials=trials, errors=errors)

    def simulate(
        self,
        code: PolarCode,
        ebn0_dbs: Sequence[float],
        max_iters: int,
        max_errors: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> list[BlerResult]:
        results = []
        for point, ebn0_db in enumerate(ebn0_dbs):
            start_time = time()
            result = self.simulate_point(code, ebn0_db, max_iters, max_errors, seed, point)
            self.logger.info(
                f"({code.n}, {code.k}) code at {ebn0_db} dB: BLER {result.bler:.4e} "
                f"({result.errors:,} errors / {result.trials:,} trials, {time() - start_time:,.1f} seconds)"
            )
            results.append(result)
        return results


def simulate_bler(
    code: PolarCode,
    ebn0_dbs: Sequence[float],
    max_iters: int,
    max_errors: Optional[int] = None,
    seed: Optional[int] = None,
    batch_size: int = 1000,
    n_processes: int = 1,
) -> list[BlerResult]:
    simulator = BlerSimulator(batch_size=batch_size, n_processes=n_processes, verbose=False)
    return simulator.simulate(code, ebn0_dbs, max_iters, max_errors, seed)
