from collections import deque
from typing import Iterable, NamedTuple

import numpy as np

from polarkern.agent.network import Batch


class Sample(NamedTuple):
    encoding: np.ndarray
    mask: np.ndarray
    policy: np.ndarray
    # scaled return z_t / value_scale
    value: float


class ReplayBuffer:
    """
    Bounded FIFO of training samples; the oldest samples are dropped first.
    """

    def __init__(self, capacity: int = 100_000):
        assert capacity >= 1, "`capacity` must be a positive integer"
        self.capacity = capacity
        self.samples: deque[Sample] = deque(maxlen=capacity)

    def __len__(self):
        return len(self.samples)

    def extend(self, samples: Iterable[Sample]) -> None:
        self.samples.extend(samples)

    def sample_batch(self, size: int, rng: np.random.Generator) -> Batch:
        assert len(self.samples) > 0, "Cannot sample from an empty replay buffer"
        indices = rng.integers(len(self.samples), size=min(size, len(self.samples)))
        chosen = [self.samples[index] for index in indices]
        return Batch(
            inputs=np.stack([sample.encoding for sample in chosen]),
            masks=np.stack([sample.mask for sample in chosen]),
            policies=np.stack([sample.policy for sample in chosen]),
            returns=np.array([sample.value for sample in chosen], dtype=float),
        )
