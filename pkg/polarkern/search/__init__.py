from polarkern.search.brute_force import BruteForceSearch, brute_force_search  # noqa: F401
from polarkern.search.config import RewardConfig, calc_reward  # noqa: F401
from polarkern.search.environment import (  # noqa: F401
    InitMode,
    Initialization,
    SearchState,
    env_reset,
    env_step,
    legal_actions,
    play_episode,
)
from polarkern.search.random_agent import RandomAgent, RandomSearchResult, random_agent_search  # noqa: F401
from polarkern.search.scaling import ScalingFit, fit_complexity_scaling, predict_complexity  # noqa: F401
