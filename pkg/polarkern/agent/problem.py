from abc import ABC, abstractmethod, abstractproperty
from typing import Any, Optional

import numpy as np

from polarkern.agent.encoding import encode_state, input_size
from polarkern.metrics import Pdp
from polarkern.search.config import RewardConfig
from polarkern.search.environment import (
    Initialization,
    SearchState,
    env_reset,
    env_step,
    legal_actions,
)


class SearchProblem(ABC):
    """
    Base class of the sequential decision problems the tree search plans on.

    A sub-class supplies the action space, the transition function and the state
    encoding fed to the network. States must be immutable: the tree keeps every
    visited state.
    """

    @abstractproperty
    def n_actions(self) -> int:
        pass

    @abstractproperty
    def input_size(self) -> int:
        pass

    @property
    def value_scale(self) -> float:
        """
        Returns are divided by this value before they reach the network.
        """

        return 1.0

    @abstractmethod
    def initial_state(self, rng: np.random.Generator) -> Any:
        pass

    @abstractmethod
    def legal_actions(self, state: Any) -> list[int]:
        pass

    @abstractmethod
    def step(self, state: Any, action: int) -> tuple[Any, float, bool]:
        pass

    @abstractmethod
    def encode(self, state: Any) -> np.ndarray:
        pass

    def action_mask(self, state: Any) -> np.ndarray:
        mask = np.zeros(self.n_actions, dtype=bool)
        mask[self.legal_actions(state)] = True
        return mask


class KernelSearchProblem(SearchProblem):
    """
    The kernel construction game of size `ell`, encoded on an `ell_max` grid.
    """

    def __init__(
        self,
        ell: int,
        target: Pdp,
        ell_max: Optional[int] = None,
        config: Optional[RewardConfig] = None,
        initialization: Optional[Initialization] = None,
    ):
        self.ell = ell
        self.ell_max = ell_max or ell
        assert self.ell_max >= ell, "`ell_max` must not be smaller than `ell`"
        self.target = target
        self.config = config or RewardConfig.for_size(ell)
        self.initialization = initialization or Initialization.none()

    @property
    def n_actions(self) -> int:
        return self.ell_max

    @property
    def input_size(self) -> int:
        return input_size(self.ell_max)

    @property
    def value_scale(self) -> float:
        assert self.config.r_max is not None
        return self.config.r_max + self.ell_max * self.config.row_reward

    def initial_state(self, rng: np.random.Generator) -> SearchState:
        return env_reset(self.ell, self.target, self.initialization, self.config, rng)

    def legal_actions(self, state: SearchState) -> list[int]:
        return legal_actions(state)

    def step(self, state: SearchState, action: int) -> tuple[SearchState, float, bool]:
        return env_step(state, action)

    def encode(self, state: SearchState) -> np.ndarray:
        return encode_state(state, self.ell_max).flatten()
