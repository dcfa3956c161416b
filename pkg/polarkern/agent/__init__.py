from polarkern.agent.encoding import StateEncoding, encode_state, input_size  # noqa: F401
from polarkern.agent.mcts import GumbelMcts, MctsConfig, MctsNode, MctsResult, mcts_search  # noqa: F401
from polarkern.agent.network import Batch, NetworkConfig, PolicyValueNet  # noqa: F401
from polarkern.agent.problem import KernelSearchProblem, SearchProblem  # noqa: F401
from polarkern.agent.replay import ReplayBuffer, Sample  # noqa: F401
from polarkern.agent.selfplay import GameRecord, SizeDistribution, play_game, self_play_iteration  # noqa: F401
from polarkern.agent.training import Trainer, TrainingConfig, TrainingResult, training_loop  # noqa: F401
