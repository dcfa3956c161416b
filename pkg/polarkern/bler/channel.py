from dataclasses import dataclass

import numpy as np

from polarkern.exceptions import InvalidCodeError


@dataclass(frozen=True)
class ChannelConfig:
    """
    BPSK (0 -> +1, 1 -> -1) over real AWGN with sigma^2 = 1 / (2 R 10^(Eb/N0 / 10)).
    """

    ebn0_db: float
    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise InvalidCodeError(
                f"A code of rate {self.rate} carries no information bits, so Eb/N0 has no noise level; "
                "unfreeze at least one position"
            )
        if self.rate > 1:
            raise InvalidCodeError(f"Code rate must not exceed 1, got {self.rate}")

    @property
    def noise_variance(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.noise_variance))

    def transmit(self, codewords: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        symbols = 1.0 - 2.0 * np.asarray(codewords, dtype=float)
        return symbols + self.sigma * rng.standard_normal(symbols.shape)

    def llr(self, received: np.ndarray) -> np.ndarray:
        return 2.0 * received / self.noise_variance
