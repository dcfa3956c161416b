from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from polarkern.exceptions import IllegalActionError, InvalidInitializationError
from polarkern.gf2 import coset_distance_rows
from polarkern.metrics import Pdp, row_partial_distances
from polarkern.models.binmatrix import BinMatrix, weight
from polarkern.models.episode import Episode, EpisodeOutcome, Step
from polarkern.rmld.decoder import kernel_complexity
from polarkern.search.brute_force import weight_candidates
from polarkern.search.config import RewardConfig, calc_reward


class InitMode(Enum):
    NONE = "NONE"
    RANDOMIZED = "RANDOMIZED"
    BOTTOM_ROWS = "BOTTOM_ROWS"


@dataclass(frozen=True)
class Initialization:
    """
    How an episode starts.

    RANDOMIZED pre-sets a few bits of the first working row (`n_bits` of them, or a
    uniform draw from 1..D_i-1; at `positions` when given). BOTTOM_ROWS fixes the
    bottom rows of `bottom_rows`; with `row_counts` the number of fixed rows is
    drawn uniformly from that set at every reset.
    """

    mode: InitMode = InitMode.NONE
    n_bits: Optional[int] = None
    positions: Optional[tuple[int, ...]] = None
    bottom_rows: Optional[BinMatrix] = None
    row_counts: tuple[int, ...] = ()

    @classmethod
    def none(cls) -> "Initialization":
        return cls()

    @classmethod
    def randomized(
        cls, n_bits: Optional[int] = None, positions: Optional[Sequence[int]] = None
    ) -> "Initialization":
        if positions is not None:
            n_bits = len(positions)
            positions = tuple(positions)
        return cls(InitMode.RANDOMIZED, n_bits=n_bits, positions=positions)

    @classmethod
    def bottom(cls, rows: BinMatrix, row_counts: Sequence[int] = ()) -> "Initialization":
        assert all(0 < count <= rows.n_rows for count in row_counts), (
            f"Row counts {list(row_counts)} exceed the {rows.n_rows} available bottom rows"
        )
        return cls(InitMode.BOTTOM_ROWS, bottom_rows=rows, row_counts=tuple(row_counts))


@dataclass(frozen=True)
class SearchState:
    """
    A partially built kernel.

    Rows below `current_row` are complete and satisfy the target partial distances;
    the current row has fewer ones than its target distance; rows above it are zero.
    """

    ell: int
    rows: tuple[int, ...]
    k: int
    t: int
    target: Pdp
    config: RewardConfig
    n_fixed: int = 0
    outcome: Optional[EpisodeOutcome] = None
    complexity: Optional[int] = None

    @property
    def current_row(self) -> int:
        return self.ell - self.k - 1

    @property
    def done(self) -> bool:
        return self.outcome is not None

    @property
    def kernel(self) -> BinMatrix:
        return BinMatrix.from_ints(self.rows, self.ell)

    @property
    def rows_completed_by_agent(self) -> int:
        return self.k - self.n_fixed


def legal_actions(state: SearchState) -> list[int]:
    if state.done:
        return []
    row = state.rows[state.current_row]
    return [column for column in range(state.ell) if not (row >> column) & 1]


def is_terminal(state: SearchState) -> bool:
    return state.done


@lru_cache(maxsize=65536)
def row_is_reachable(ell: int, below: tuple[int, ...], distance: int) -> bool:
    """
    Whether some row of weight `distance` lies at distance exactly `distance` from
    the span of `below`. A rejected row is cleared, so when no such row exists the
    game cannot progress from this point whatever the agent plays.
    """

    if distance > ell:
        return False
    if not below:
        return True
    return any(
        coset_distance_rows(candidate, below, bound=distance - 1) == distance
        for candidate in weight_candidates(ell, distance)
    )


def _dead_end(rows: Sequence[int], row_index: int, target: Pdp, ell: int) -> bool:
    return not row_is_reachable(ell, tuple(rows[row_index + 1:]), target[row_index])


def _place_bottom_rows(
    rows: list[int], initialization: Initialization, target: Pdp, ell: int, rng: np.random.Generator
) -> int:
    source = initialization.bottom_rows
    assert source is not None, "BOTTOM_ROWS initialization needs `bottom_rows`"
    count = source.n_rows
    if initialization.row_counts:
        count = int(rng.choice(initialization.row_counts))
    fixed = source.slice_rows(source.n_rows - count, source.n_rows)

    if fixed.n_cols != ell or not 0 < count < ell:
        raise InvalidInitializationError(
            f"Bottom rows must have {ell} columns and fewer than {ell} rows, got shape {fixed.shape}"
        )
    distances = tuple(row_partial_distances(fixed.rows))
    if distances != target.suffix(count):
        raise InvalidInitializationError(
            f"Bottom rows have partial distances {distances}, target suffix is {target.suffix(count)}"
        )
    rows[ell - count:] = fixed.rows
    return count


def env_reset(
    ell: int,
    target: Pdp,
    initialization: Optional[Initialization] = None,
    config: Optional[RewardConfig] = None,
    rng: Optional[np.random.Generator] = None,
) -> SearchState:
    assert len(target) == ell, f"Target PDP has {len(target)} entries for l = {ell}"
    initialization = initialization or Initialization.none()
    config = config or RewardConfig.for_size(ell)
    rng = rng if rng is not None else np.random.default_rng()
    rows = [0] * ell
    fixed = 0

    if initialization.mode == InitMode.BOTTOM_ROWS:
        fixed = _place_bottom_rows(rows, initialization, target, ell, rng)

    elif initialization.mode == InitMode.RANDOMIZED:
        # a bottom row of full weight has only one choice, so it is fixed up front
        if target[ell - 1] == ell:
            rows[ell - 1] = (1 << ell) - 1
            fixed = 1
        current = ell - fixed - 1
        distance = target[current]
        if initialization.positions is not None:
            positions = list(initialization.positions)
        else:
            n_bits = initialization.n_bits
            if n_bits is None:
                n_bits = int(rng.integers(1, distance)) if distance > 1 else 0
            positions = rng.choice(ell, size=n_bits, replace=False).tolist()
        if len(set(positions)) != len(positions) or len(positions) >= distance:
            raise InvalidInitializationError(
                f"Cannot pre-set {len(positions)} distinct bits in a row with target distance {distance}"
            )
        rows[current] = sum(1 << int(position) for position in positions)

    outcome = EpisodeOutcome.DEAD_END if _dead_end(rows, ell - fixed - 1, target, ell) else None
    return SearchState(
        ell=ell, rows=tuple(rows), k=fixed, t=0, target=target, config=config, n_fixed=fixed,
        outcome=outcome,
    )


def env_step(state: SearchState, action: int) -> tuple[SearchState, float, bool]:
    """
    Sets bit `action` of the current row.

    A row that reaches its target weight is checked against the rows below it: it is
    accepted (reward `row_reward`) when its distance to their span equals the target,
    and cleared otherwise. Accepting the last row ends the episode with the extra
    complexity reward. The episode also ends, without bonus, after `max_steps` steps
    or as a DEAD_END once no row can satisfy the next target distance.
    """

    if state.done:
        raise IllegalActionError("The episode is already finished")
    row_index = state.current_row
    row = state.rows[row_index]
    if not 0 <= action < state.ell or (row >> action) & 1:
        raise IllegalActionError(f"Column {action} is not a legal action for row {row_index}")

    config = state.config
    rows = list(state.rows)
    row |= 1 << action
    rows[row_index] = row
    k = state.k
    reward = -config.step_penalty
    outcome = None
    complexity = None

    distance = state.target[row_index]
    if weight(row) == distance:
        below = rows[row_index + 1:]
        achieved = coset_distance_rows(row, below, bound=distance - 1) if below else weight(row)
        if achieved == distance:
            k += 1
            reward = config.row_reward
            if k == state.ell:
                complexity = kernel_complexity(BinMatrix.from_ints(rows, state.ell)).total
                reward += calc_reward(complexity, config)
                outcome = EpisodeOutcome.COMPLETE
            elif _dead_end(rows, row_index - 1, state.target, state.ell):
                outcome = EpisodeOutcome.DEAD_END
        else:
            rows[row_index] = 0

    t = state.t + 1
    if outcome is None and config.max_steps is not None and t >= config.max_steps:
        outcome = EpisodeOutcome.TIMEOUT

    next_state = replace(
        state, rows=tuple(rows), k=k, t=t, outcome=outcome, complexity=complexity
    )
    return next_state, reward, next_state.done


Policy = Callable[[SearchState, list[int]], int]


def uniform_policy(rng: np.random.Generator) -> Policy:
    def choose(state: SearchState, actions: list[int]) -> int:
        return actions[int(rng.integers(len(actions)))]

    return choose


def play_episode(state: SearchState, policy: Policy, keep_states: bool = False) -> Episode:
    """
    Runs `policy` from `state` until the episode ends.
    """

    episode = Episode()
    while not state.done:
        action = policy(state, legal_actions(state))
        next_state, reward, _ = env_step(state, action)
        episode.steps.append(Step(state if keep_states else None, action, reward))
        state = next_state

    episode.outcome = state.outcome
    if state.outcome == EpisodeOutcome.COMPLETE:
        episode.final_kernel = state.kernel
        episode.final_complexity = state.complexity
    return episode
