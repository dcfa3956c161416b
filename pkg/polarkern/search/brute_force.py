from itertools import combinations
from logging import Logger
from time import time
from typing import Iterator, Optional

from polarkern.gf2 import coset_distance_rows
from polarkern.logger import logger
from polarkern.metrics import Pdp
from polarkern.models.binmatrix import BinMatrix


def weight_candidates(ell: int, distance: int) -> Iterator[int]:
    """
    All length-l rows of weight `distance`, ordered lexicographically by the
    positions of their ones (1100 before 1010 before 0110 ...).
    """

    for positions in combinations(range(ell), distance):
        yield sum(1 << position for position in positions)


@logger
class BruteForceSearch:
    """
    Depth-first backtracking over the rows of a kernel, bottom row first.

    Row i is drawn from the weight-D_i rows in lexicographic order and kept when its
    distance to the span of the rows below equals D_i. `budget` bounds the number of
    candidate rows evaluated.

    The lexicographic first-hit order makes the search sequential; it runs in a
    single process.
    """

    logger: Logger

    def __init__(self, budget: int):
        assert budget >= 1, "`budget` must be a positive integer"
        self.budget = budget
        self.evaluations = 0

    def _extend(self, rows: list[int], target: Pdp, ell: int) -> Optional[list[int]]:
        index = ell - len(rows) - 1
        if index < 0:
            return rows
        distance = target[index]
        if not 1 <= distance <= ell:
            return None

        for candidate in weight_candidates(ell, distance):
            if self.evaluations >= self.budget:
                return None
            self.evaluations += 1
            achieved = coset_distance_rows(candidate, rows, bound=distance - 1) if rows else distance
            if achieved != distance:
                continue
            found = self._extend([candidate] + rows, target, ell)
            if found is not None:
                return found
        return None

    def search(self, ell: int, target: Pdp) -> Optional[BinMatrix]:
        assert len(target) == ell, f"Target PDP has {len(target)} entries for l = {ell}"
        self.evaluations = 0
        start_time = time()
        rows = self._extend([], target, ell)
        elapsed = time() - start_time

        if rows is None:
            self.logger.info(
                f"No kernel found for target {list(target)} after {self.evaluations:,} evaluations "
                f"({elapsed:,.1f} seconds)"
            )
            return None
        self.logger.info(
            f"Kernel found for target {list(target)} after {self.evaluations:,} evaluations "
            f"({elapsed:,.1f} seconds)"
        )
        return BinMatrix.from_ints(rows, ell)


def brute_force_search(ell: int, target: Pdp, budget: int) -> Optional[BinMatrix]:
    return BruteForceSearch(budget=budget).search(ell, target)
