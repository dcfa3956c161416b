from dataclasses import asdict, dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Union

import numpy as np
import torch
from torch import nn


CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class NetworkConfig:
    input_size: int
    n_actions: int
    hidden: tuple[int, ...] = (256, 256)
    learning_rate: float = 1e-3
    momentum: float = 0.9
    l2: float = 1e-4
    seed: Optional[int] = None

    def __post_init__(self):
        assert self.input_size >= 1, "`input_size` must be positive"
        assert self.n_actions >= 1, "`n_actions` must be positive"
        assert len(self.hidden) >= 1 and all(width >= 1 for width in self.hidden), (
            "`hidden` must list at least one positive layer width"
        )
        assert self.learning_rate > 0, "`learning_rate` must be positive"
        assert 0 <= self.momentum < 1, "`momentum` must lie in [0, 1)"
        assert self.l2 >= 0, "`l2` must be non-negative"


class Batch(NamedTuple):
    """
    `inputs` (B, input_size), `masks` (B, n_actions) legal-action masks,
    `policies` (B, n_actions) target distributions, `returns` (B,) scaled returns.
    """

    inputs: np.ndarray
    masks: np.ndarray
    policies: np.ndarray
    returns: np.ndarray


def masked_log_softmax(logits: torch.Tensor, masks: torch.Tensor) -> torch.Tensor:
    """
    Log-probabilities renormalized over the legal actions; illegal actions get -inf.
    """

    return torch.log_softmax(logits.masked_fill(~masks, float("-inf")), dim=-1)


class PolicyValueNet(nn.Module):
    """
    Fully connected policy/value network: tanh hidden layers shared by a policy head
    of width n_actions (masked softmax) and a tanh value head.

    Trained by SGD with momentum on
        mean[(z - v)^2 - pi . log p] + l2 * sum(theta^2)
    """

    def __init__(self, config: NetworkConfig):
        super().__init__()
        self.config = config
        with torch.random.fork_rng():
            if config.seed is not None:
                torch.manual_seed(config.seed)
            layers: list[nn.Module] = []
            widths = [config.input_size, *config.hidden]
            for fan_in, fan_out in zip(widths[:-1], widths[1:]):
                layers += [nn.Linear(fan_in, fan_out), nn.Tanh()]
            self.trunk = nn.Sequential(*layers)
            self.policy_head = nn.Linear(widths[-1], config.n_actions)
            self.value_head = nn.Linear(widths[-1], 1)
        self.optimizer = torch.optim.SGD(self.parameters(), lr=config.learning_rate, momentum=config.momentum)

    def forward(self, inputs: torch.Tensor, masks: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """
        Returns the masked log-policy (B, n_actions) and the value (B,).
        """

        features = self.trunk(inputs)
        log_policy = masked_log_softmax(self.policy_head(features), masks)
        value = torch.tanh(self.value_head(features)).squeeze(-1)
        return log_policy, value

    def evaluate(self, encoding: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, float]:
        """
        Policy logits (log-probabilities, illegal actions at -inf) and value for a single state.
        """

        with torch.no_grad():
            log_policy, value = self(
                torch.as_tensor(encoding, dtype=torch.float32)[None, :],
                torch.as_tensor(mask, dtype=torch.bool)[None, :],
            )
        return log_policy[0].double().numpy(), float(value[0])

    def regularization(self, l2: Optional[float] = None) -> torch.Tensor:
        l2 = self.config.l2 if l2 is None else l2
        return l2 * sum(parameter.pow(2).sum() for parameter in self.parameters())

    def _loss(self, batch: Batch, l2: Optional[float] = None) -> torch.Tensor:
        masks = torch.as_tensor(batch.masks, dtype=torch.bool)
        policies = torch.as_tensor(batch.policies, dtype=torch.float32)
        returns = torch.as_tensor(batch.returns, dtype=torch.float32)
        log_policy, value = self(torch.as_tensor(batch.inputs, dtype=torch.float32), masks)

        # illegal actions carry no target mass; their -inf log-probability is masked out
        cross_entropy = -(policies * log_policy.masked_fill(~masks, 0.0)).sum(dim=-1)
        return ((returns - value) ** 2 + cross_entropy).mean() + self.regularization(l2)

    def loss(self, batch: Batch, l2: Optional[float] = None) -> float:
        with torch.no_grad():
            return float(self._loss(batch, l2))

    def train_step(self, batch: Batch, l2: Optional[float] = None) -> float:
        """
        One momentum SGD step; returns the loss before the update.
        """

        assert len(batch.inputs) > 0, "Cannot train on an empty batch"
        self.optimizer.zero_grad()
        loss = self._loss(batch, l2)
        loss.backward()
        self.optimizer.step()
        return float(loss.detach())

    def save(self, path: Union[str, Path]) -> None:
        config = asdict(self.config)
        config["hidden"] = list(self.config.hidden)
        torch.save({"version": CHECKPOINT_VERSION, "config": config, "state_dict": self.state_dict()}, path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PolicyValueNet":
        checkpoint = torch.load(path)
        assert checkpoint.get("version") == CHECKPOINT_VERSION, (
            f"Unsupported checkpoint version {checkpoint.get('version')}, expected {CHECKPOINT_VERSION}"
        )
        config = dict(checkpoint["config"])
        config["hidden"] = tuple(config["hidden"])
        net = cls(NetworkConfig(**config))
        net.load_state_dict(checkpoint["state_dict"])
        return net
