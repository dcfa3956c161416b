from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np

from polarkern.models.binmatrix import BinMatrix


class EpisodeOutcome(Enum):
    COMPLETE = "COMPLETE"
    TIMEOUT = "TIMEOUT"
    DEAD_END = "DEAD_END"


@dataclass(frozen=True)
class Step:
    state: Any
    action: int
    reward: float


@dataclass
class Episode:
    """
    (state, action, reward) trajectory of one kernel construction game.
    """

    steps: list[Step] = field(default_factory=list)
    outcome: Optional[EpisodeOutcome] = None
    final_kernel: Optional[BinMatrix] = None
    final_complexity: Optional[int] = None

    def __len__(self):
        return len(self.steps)

    @property
    def rewards(self) -> np.ndarray:
        return np.array([step.reward for step in self.steps], dtype=float)

    @property
    def total_reward(self) -> float:
        return float(self.rewards.sum())

    @property
    def is_complete(self) -> bool:
        return self.outcome == EpisodeOutcome.COMPLETE

    def returns(self) -> np.ndarray:
        """
        z_t = sum_{k >= t} r_k for every step t.
        """

        return np.cumsum(self.rewards[::-1])[::-1]
