from dataclasses import dataclass, field
from math import ceil, log2, sqrt
from typing import Any, Optional

import numpy as np

from polarkern.agent.network import PolicyValueNet
from polarkern.agent.problem import SearchProblem
from polarkern.exceptions import IllegalActionError


@dataclass(frozen=True)
class MctsConfig:
    """
    `n_simulations` is the per-move budget and `n_candidates` the number m of root
    actions sampled with Gumbel noise. `c_visit` and `c_scale` parametrize the
    monotone transform sigma(q) = (c_visit + max_b N(b)) * c_scale * q applied to
    min-max normalized Q-values; `c_puct` weighs the prior below the root.
    """

    n_simulations: int = 32
    n_candidates: int = 16
    c_visit: float = 50.0
    c_scale: float = 1.0
    c_puct: float = 1.25
    gumbel_scale: float = 1.0

    def __post_init__(self):
        assert self.n_candidates >= 2, "`n_candidates` must be at least 2"
        assert self.n_simulations >= self.n_candidates, "`n_simulations` must be at least `n_candidates`"
        assert self.gumbel_scale >= 0, "`gumbel_scale` must be non-negative"


@dataclass(eq=False)
class MctsNode:
    state: Any
    # reward of the transition into this node, in value units
    reward: float = 0.0
    done: bool = False
    prior: float = 0.0
    visit_count: int = 0
    value_sum: float = 0.0
    expanded: bool = False
    logits: Optional[np.ndarray] = None
    children: dict[int, "MctsNode"] = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return self.value_sum / self.visit_count if self.visit_count else 0.0

    def q_value(self, action: int) -> float:
        child = self.children[action]
        return child.reward + child.mean

    def child_visits(self, action: int) -> int:
        child = self.children.get(action)
        return child.visit_count if child is not None else 0


@dataclass(frozen=True)
class HalvingRound:
    candidates: tuple[int, ...]
    simulations: tuple[int, ...]
    survivors: tuple[int, ...]


@dataclass
class MctsResult:
    action: int
    policy: np.ndarray
    root: MctsNode
    rounds: list[HalvingRound] = field(default_factory=list)

    @property
    def root_visits(self) -> dict[int, int]:
        return {action: child.visit_count for action, child in self.root.children.items()}


class GumbelMcts:
    """
    Tree search with Gumbel top-m sampling and sequential halving at the root and
    PUCT selection below it.

    Values live in network units: raw rewards are divided by the problem's
    `value_scale` before they enter the tree.
    """

    def __init__(self, problem: SearchProblem, net: PolicyValueNet, config: Optional[MctsConfig] = None):
        self.problem = problem
        self.net = net
        self.config = config or MctsConfig()

    def _expand(self, node: MctsNode) -> float:
        node.expanded = True
        if node.done:
            return 0.0
        logits, value = self.net.evaluate(self.problem.encode(node.state), self.problem.action_mask(node.state))
        node.logits = logits
        return value

    def _child(self, node: MctsNode, action: int) -> MctsNode:
        if action not in node.children:
            assert node.logits is not None
            next_state, reward, done = self.problem.step(node.state, action)
            legal = np.isfinite(node.logits)
            priors = np.exp(node.logits - node.logits[legal].max())
            priors /= priors.sum()
            node.children[action] = MctsNode(
                state=next_state,
                reward=reward / self.problem.value_scale,
                done=done,
                prior=float(priors[action]),
            )
        return node.children[action]

    def _select(self, node: MctsNode) -> int:
        assert node.logits is not None
        legal = np.flatnonzero(np.isfinite(node.logits))
        priors = np.exp(node.logits[legal] - node.logits[legal].max())
        priors /= priors.sum()
        exploration = self.config.c_puct * sqrt(node.visit_count)
        best_action, best_score = int(legal[0]), -np.inf
        for action, prior in zip(legal, priors):
            action = int(action)
            visits = node.child_visits(action)
            q_value = node.q_value(action) if visits else node.mean
            score = q_value + exploration * prior / (1 + visits)
            if score > best_score:
                best_action, best_score = action, score
        return best_action

    @staticmethod
    def _backup(path: list[MctsNode], value: float) -> None:
        accumulated = value
        for node in reversed(path):
            node.visit_count += 1
            node.value_sum += accumulated
            accumulated = node.reward + accumulated

    def simulate(self, root: MctsNode, action: int) -> None:
        """
        One simulation forced through root action `action`.
        """

        path = [root]
        node, next_action = root, action
        while True:
            child = self._child(node, next_action)
            path.append(child)
            if not child.expanded:
                value = self._expand(child)
                break
            if child.done:
                value = 0.0
                break
            node, next_action = child, self._select(child)
        self._backup(path, value)

    def completed_q(self, root: MctsNode, legal: np.ndarray) -> np.ndarray:
        """
        Q-values of the legal root actions, unvisited ones completed with the root value,
        min-max normalized to [0, 1].
        """

        values = np.array(
            [root.q_value(int(action)) if root.child_visits(int(action)) else root.mean for action in legal]
        )
        low, high = values.min(), values.max()
        if high > low:
            return (values - low) / (high - low)
        return np.zeros_like(values)

    def sigma(self, root: MctsNode, completed: np.ndarray) -> np.ndarray:
        max_visits = max((child.visit_count for child in root.children.values()), default=0)
        return (self.config.c_visit + max_visits) * self.config.c_scale * completed

    def improved_policy(self, root: MctsNode, legal: np.ndarray) -> np.ndarray:
        assert root.logits is not None
        scores = root.logits[legal] + self.sigma(root, self.completed_q(root, legal))
        weights = np.exp(scores - scores.max())
        policy = np.zeros(self.problem.n_actions)
        policy[legal] = weights / weights.sum()
        return policy

    def search(self, state: Any, rng: np.random.Generator) -> MctsResult:
        legal = np.array(self.problem.legal_actions(state), dtype=int)
        if not len(legal):
            raise IllegalActionError("Tree search needs at least one legal action")

        root = MctsNode(state=state)
        self._backup([root], self._expand(root))
        if len(legal) == 1:
            policy = np.zeros(self.problem.n_actions)
            policy[legal[0]] = 1.0
            return MctsResult(action=int(legal[0]), policy=policy, root=root)

        assert root.logits is not None
        gumbel = self.config.gumbel_scale * rng.gumbel(size=self.problem.n_actions)
        base_scores = gumbel + np.where(np.isfinite(root.logits), root.logits, -np.inf)
        n_candidates = min(self.config.n_candidates, len(legal))
        order = sorted(legal.tolist(), key=lambda action: -base_scores[action])
        candidates = order[:n_candidates]

        rounds: list[HalvingRound] = []
        n_rounds = ceil(log2(n_candidates))
        remaining = self.config.n_simulations
        for index in range(n_rounds):
            budget = remaining // (n_rounds - index)
            remaining -= budget
            per_candidate, extra = divmod(budget, len(candidates))
            simulations = tuple(per_candidate + (rank < extra) for rank in range(len(candidates)))
            for action, count in zip(candidates, simulations):
                for _ in range(count):
                    self.simulate(root, action)

            completed = self.sigma(root, self.completed_q(root, legal))
            sigma_by_action = dict(zip(legal.tolist(), completed))
            ranked = sorted(candidates, key=lambda action: -(base_scores[action] + sigma_by_action[action]))
            survivors = ranked[: ceil(len(candidates) / 2)]
            rounds.append(HalvingRound(tuple(candidates), simulations, tuple(survivors)))
            candidates = survivors

        return MctsResult(
            action=int(candidates[0]), policy=self.improved_policy(root, legal), root=root, rounds=rounds
        )


def mcts_search(
    problem: SearchProblem,
    state: Any,
    net: PolicyValueNet,
    rng: np.random.Generator,
    config: Optional[MctsConfig] = None,
) -> MctsResult:
    return GumbelMcts(problem, net, config).search(state, rng)
