from pkg_resources import resource_filename

from pathlib import Path

import numpy as np

from polarkern.gf2 import rank
from polarkern.models.binmatrix import BinMatrix


def get_fixture_path(fixture_name: str = "") -> Path:
    return Path(
        resource_filename(__name__, fixture_name),
    )


def random_kernel(size: int, rng: np.random.Generator) -> BinMatrix:
    """
    Uniformly drawn non-singular size x size matrix.
    """

    while True:
        kernel = BinMatrix.from_numpy(rng.integers(0, 2, size=(size, size)))
        if rank(kernel) == size:
            return kernel
