from dataclasses import dataclass

import numpy as np

from polarkern.search.environment import SearchState


@dataclass(frozen=True, eq=False)
class StateEncoding:
    """
    Network input for a kernel state: the l x l matrix zero-padded to l_max x l_max,
    a one-hot indicator of the current row and l / l_max.
    """

    grid: np.ndarray
    row_onehot: np.ndarray
    size_scalar: float

    def flatten(self) -> np.ndarray:
        return np.concatenate(
            [self.grid.ravel(), self.row_onehot, np.array([self.size_scalar], dtype=np.float32)]
        ).astype(np.float32)


def input_size(ell_max: int) -> int:
    return ell_max * ell_max + ell_max + 1


def encode_state(state: SearchState, ell_max: int) -> StateEncoding:
    assert state.ell <= ell_max, f"State of size {state.ell} does not fit l_max = {ell_max}"
    grid = np.zeros((ell_max, ell_max), dtype=np.float32)
    for index, row in enumerate(state.rows):
        grid[index, : state.ell] = [(row >> column) & 1 for column in range(state.ell)]

    row_onehot = np.zeros(ell_max, dtype=np.float32)
    # a finished kernel points at row 0
    row_onehot[max(state.current_row, 0)] = 1.0
    return StateEncoding(grid=grid, row_onehot=row_onehot, size_scalar=state.ell / ell_max)
