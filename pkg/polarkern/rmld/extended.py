from dataclasses import dataclass

from polarkern.exceptions import Gf2Error
from polarkern.models.binmatrix import BinMatrix


@dataclass(frozen=True)
class ExtendedKernel:
    """
    Rows i..l-1 of a kernel with the indicator column kappa = [1, 0, ..., 0] appended.

    The appended symbol equals the bit decoded in phase i, so the soft output of
    phase i compares the two halves of the extended code split on that column.
    """

    base: BinMatrix
    phase: int

    @property
    def ell(self) -> int:
        return self.base.n_cols - 1

    @property
    def kappa_column(self) -> int:
        return self.ell

    def kernel_rows(self) -> BinMatrix:
        return self.base.slice_cols(0, self.ell)


def extend_kernel(kernel: BinMatrix, phase: int) -> ExtendedKernel:
    if not kernel.is_square:
        raise Gf2Error(f"A kernel must be square, got shape {kernel.shape}")
    if not 0 <= phase < kernel.n_rows:
        raise Gf2Error(f"Phase {phase} out of range for a kernel of size {kernel.n_rows}")

    remaining = kernel.slice_rows(phase, kernel.n_rows)
    kappa = [1] + [0] * (remaining.n_rows - 1)
    return ExtendedKernel(base=remaining.append_column(kappa), phase=phase)
