from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import numpy as np

from polarkern.agent.mcts import GumbelMcts, MctsConfig
from polarkern.agent.network import PolicyValueNet
from polarkern.agent.problem import SearchProblem
from polarkern.agent.replay import ReplayBuffer, Sample
from polarkern.parallel import imap_with_parallel, spawn_seeds


@dataclass(frozen=True)
class SizeDistribution:
    """
    Distribution of kernel sizes self-play games are drawn from.
    """

    sizes: tuple[int, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        assert len(self.sizes) == len(self.probabilities) > 0, "Sizes and probabilities must match"
        assert all(probability >= 0 for probability in self.probabilities), "Probabilities must be non-negative"
        assert abs(sum(self.probabilities) - 1.0) < 1e-6, (
            f"Size probabilities must sum to 1, got {sum(self.probabilities)}"
        )

    @classmethod
    def point(cls, ell: int) -> "SizeDistribution":
        return cls((ell,), (1.0,))

    @classmethod
    def from_mapping(cls, weights: Mapping[int, float]) -> "SizeDistribution":
        sizes = tuple(sorted(weights, reverse=True))
        return cls(sizes, tuple(float(weights[size]) for size in sizes))

    @classmethod
    def from_string(cls, text: str) -> "SizeDistribution":
        """
        Parses "16:0.4,15:0.29,14:0.15,13:0.11,12:0.05".
        """

        weights = {}
        for item in text.split(","):
            size, _, probability = item.partition(":")
            weights[int(size)] = float(probability) if probability else 1.0
        return cls.from_mapping(weights)

    @property
    def ell_max(self) -> int:
        return max(self.sizes)

    def sample(self, rng: np.random.Generator) -> int:
        return int(self.sizes[rng.choice(len(self.sizes), p=self.probabilities)])


@dataclass
class GameRecord:
    ell: int
    actions: list[int] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    samples: list[Sample] = field(default_factory=list)
    final_state: Any = None

    @property
    def total_reward(self) -> float:
        return float(np.sum(self.rewards))

    def returns(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.rewards, dtype=float)[::-1])[::-1]


def play_game(
    problem: SearchProblem,
    net: PolicyValueNet,
    rng: np.random.Generator,
    mcts_config: Optional[MctsConfig] = None,
    ell: Optional[int] = None,
) -> GameRecord:
    """
    Plays one episode choosing every move by tree search; the stored value targets
    are the suffix sums of the episode rewards, divided by the problem's value scale.
    """

    search = GumbelMcts(problem, net, mcts_config)
    state = problem.initial_state(rng)
    record = GameRecord(ell=ell if ell is not None else getattr(state, "ell", 0))
    encodings, masks, policies = [], [], []
    done = False
    while not done:
        result = search.search(state, rng)
        encodings.append(problem.encode(state))
        masks.append(problem.action_mask(state))
        policies.append(result.policy)
        state, reward, done = problem.step(state, result.action)
        record.actions.append(result.action)
        record.rewards.append(reward)

    record.final_state = state
    values = record.returns() / problem.value_scale
    record.samples = [
        Sample(encoding, mask, policy, float(value))
        for encoding, mask, policy, value in zip(encodings, masks, policies, values)
    ]
    return record


class SelfPlayWorker:
    """
    Picklable game runner: holds a network snapshot and one problem per kernel size.
    """

    def __init__(
        self,
        problems: Mapping[int, SearchProblem],
        sizes: SizeDistribution,
        net: PolicyValueNet,
        mcts_config: Optional[MctsConfig] = None,
    ):
        missing = sorted(set(sizes.sizes) - set(problems))
        assert not missing, f"No search problem for sizes {missing}"
        self.problems = dict(problems)
        self.sizes = sizes
        self.net = net
        self.mcts_config = mcts_config

    def __call__(self, seed: np.random.SeedSequence) -> GameRecord:
        rng = np.random.default_rng(seed)
        ell = self.sizes.sample(rng)
        return play_game(self.problems[ell], self.net, rng, self.mcts_config, ell=ell)


def self_play_iteration(
    problems: Mapping[int, SearchProblem],
    net: PolicyValueNet,
    games: int,
    sizes: SizeDistribution,
    buffer: Optional[ReplayBuffer] = None,
    mcts_config: Optional[MctsConfig] = None,
    seed: Optional[int] = None,
    iteration: int = 0,
    n_processes: int = 1,
) -> list[GameRecord]:
    """
    Plays `games` games against a snapshot of `net` and appends their samples to `buffer`.

    Game j of iteration i uses the j-th child of the seed stream keyed by i, so the
    records do not depend on `n_processes`.
    """

    assert games >= 1, "`games` must be a positive integer"
    worker = SelfPlayWorker(problems, sizes, net, mcts_config)
    with imap_with_parallel(n_processes) as imap:
        records = list(imap(worker, spawn_seeds(seed, games, iteration)))
    if buffer is not None:
        for record in records:
            buffer.extend(record.samples)
    return records

