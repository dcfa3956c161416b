import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from polarkern.exceptions import (
    NonPolarizingKernelError,
    PolarKernError,
    SingularMatrixError,
    UnsupportedSizeError,
)
from polarkern.gf2 import coset_distance_rows, rank
from polarkern.models.binmatrix import BinMatrix, weight


# Relaxed target partial distance profiles, indexed by kernel size
TARGET_PDPS: dict[int, tuple[int, ...]] = {
    2: (1, 2),
    4: (1, 2, 2, 4),
    5: (1, 2, 2, 2, 4),
    6: (1, 2, 2, 2, 4, 4),
    7: (1, 2, 2, 2, 4, 4, 4),
    8: (1, 2, 2, 2, 4, 4, 4, 8),
    9: (1, 2, 2, 2, 2, 4, 4, 6, 6),
    10: (1, 2, 2, 2, 2, 4, 4, 4, 6, 8),
    11: (1, 2, 2, 2, 2, 4, 4, 4, 6, 6, 8),
    12: (1, 2, 2, 2, 2, 4, 4, 4, 4, 6, 6, 12),
    13: (1, 2, 2, 2, 2, 4, 4, 4, 4, 6, 6, 8, 10),
    14: (1, 2, 2, 2, 2, 4, 4, 4, 4, 6, 6, 8, 8, 8),
    15: (1, 2, 2, 2, 2, 4, 4, 4, 4, 6, 6, 8, 8, 8, 8),
    16: (1, 2, 2, 2, 2, 4, 4, 4, 4, 6, 6, 8, 8, 8, 8, 16),
}

# Largest kernel accepted by the exhaustive partial distance computation
MAX_PDP_SIZE = 32


@dataclass(frozen=True)
class ErrorExponent:
    value: float

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class Pdp:
    """
    Partial distance profile D_0..D_{l-1} of a kernel (or a target profile).
    """

    distances: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "distances", tuple(int(value) for value in self.distances))

    def __iter__(self) -> Iterator[int]:
        return iter(self.distances)

    def __len__(self):
        return len(self.distances)

    def __getitem__(self, index: int) -> int:
        return self.distances[index]

    @property
    def ell(self) -> int:
        return len(self.distances)

    @property
    def exponent(self) -> ErrorExponent:
        return error_exponent(self)

    def suffix(self, count: int) -> tuple[int, ...]:
        return self.distances[self.ell - count:] if count else ()

    def to_json(self) -> dict:
        return {
            "l": self.ell,
            "pdp": list(self.distances),
            "exponent": round(self.exponent.value, 4),
        }


def row_partial_distances(rows: Sequence[int]) -> list[int]:
    """
    D_i of every row against the span of the rows below it.
    """

    return [
        coset_distance_rows(row, rows[index + 1:]) if index + 1 < len(rows) else weight(row)
        for index, row in enumerate(rows)
    ]


def partial_distance_profile(kernel: BinMatrix) -> Pdp:
    if not kernel.is_square:
        raise PolarKernError(f"A kernel must be square, got shape {kernel.shape}")
    if kernel.n_rows > MAX_PDP_SIZE:
        raise UnsupportedSizeError(
            f"Exhaustive partial distances are limited to l <= {MAX_PDP_SIZE}, got {kernel.n_rows}"
        )
    if rank(kernel) != kernel.n_rows:
        raise SingularMatrixError("Partial distances are only defined for non-singular kernels")
    return Pdp(tuple(row_partial_distances(kernel.rows)))


def error_exponent(pdp: Pdp) -> ErrorExponent:
    """
    E = (1/l) * sum_i log_l(D_i).
    """

    if any(distance < 1 for distance in pdp):
        raise PolarKernError(f"All partial distances must be at least 1, got {list(pdp)}")
    ell = len(pdp)
    if ell < 2:
        raise UnsupportedSizeError("The error exponent is defined for kernels of size at least 2")
    if all(distance == 1 for distance in pdp):
        raise NonPolarizingKernelError(
            f"A kernel with partial distances {list(pdp)} does not polarize; its error exponent is 0"
        )
    return ErrorExponent(sum(math.log(distance, ell) for distance in pdp) / ell)


def target_pdp(ell: int) -> Pdp:
    if ell not in TARGET_PDPS:
        raise UnsupportedSizeError(
            f"No target PDP for l = {ell}. Supported sizes: {sorted(TARGET_PDPS)}"
        )
    return Pdp(TARGET_PDPS[ell])


def is_kernel_valid(kernel: BinMatrix, target: Pdp) -> bool:
    if kernel.n_rows != len(target) or rank(kernel) != kernel.n_rows:
        return False
    return tuple(partial_distance_profile(kernel)) == tuple(target)
