from contextlib import contextmanager
from functools import partial
from multiprocessing import Pool
from typing import Optional

import numpy as np


@contextmanager
def imap_with_parallel(n_processes: int, chunksize: Optional[int] = None):
    """
    Returns regular `map` if n_processes = 1 else multi-processing `imap`.
    chunksize is only used in the parallel setting.

    `imap` keeps the input order, so merging the yielded results gives the same
    answer for any number of processes.
    """

    assert n_processes >= 1, "`n_processes` must be a positive integer"
    if n_processes > 1:
        with Pool(n_processes) as pool:
            yield partial(pool.imap, chunksize=chunksize or 1)
    else:
        yield map


def spawn_seeds(seed: Optional[int], count: int, *key: int) -> list[np.random.SeedSequence]:
    """
    Splits a master seed into `count` independent streams.

    The optional `key` entries are mixed into the root entropy, so that e.g. every
    SNR point of a simulation gets its own family of streams.
    """

    root = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return root.spawn(count)


def shard_sizes(total: int, shard_size: int) -> list[int]:
    """
    Splits `total` work items into shards of `shard_size` (the last one may be smaller).
    """

    assert total >= 0 and shard_size >= 1
    full, rest = divmod(total, shard_size)
    return [shard_size] * full + ([rest] if rest else [])
