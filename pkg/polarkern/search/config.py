import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Union

from polarkern.metrics import TARGET_PDPS


# (C_min, C_max) observed per kernel size; 16 uses the bounds of the training setup,
# the others the best known and worst random-agent complexities.
COMPLEXITY_BOUNDS: dict[int, tuple[int, int]] = {
    2: (8, 10),
    4: (32, 44),
    5: (57, 93),
    6: (88, 158),
    7: (121, 249),
    8: (156, 340),
    9: (277, 603),
    10: (316, 854),
    11: (509, 1311),
    12: (764, 1834),
    13: (1137, 2731),
    14: (1548, 3758),
    15: (2245, 5669),
    16: (1300, 5000),
}

MAX_STEPS: dict[int, int] = {16: 250}


def default_max_steps(ell: int) -> int:
    if ell in MAX_STEPS:
        return MAX_STEPS[ell]
    return 3 * sum(TARGET_PDPS.get(ell, (ell,) * ell))


@dataclass(frozen=True)
class RewardConfig:
    """
    Reward shaping of the kernel construction game.

    Every step costs `step_penalty`; an accepted row earns `row_reward`; the
    final row additionally earns calc_reward(C) for the kernel's RMLD complexity C.
    `max_steps = None` disables the timeout (used by the random agent).
    """

    step_penalty: float = 0.1
    row_reward: float = 10.0
    gamma: float = 2.0
    r_min: float = 0.0
    r_max: Optional[float] = None
    c_min: float = 1300.0
    c_max: float = 5000.0
    max_steps: Optional[int] = 250

    def __post_init__(self):
        if self.r_max is None:
            object.__setattr__(self, "r_max", float(self.c_max - self.c_min))
        assert self.step_penalty >= 0, "`step_penalty` must be non-negative"
        assert self.c_min < self.c_max, "`c_min` must be smaller than `c_max`"
        assert self.r_min <= self.r_max, "`r_min` must not exceed `r_max`"
        assert self.max_steps is None or self.max_steps >= 1, "`max_steps` must be positive"

    @classmethod
    def for_size(cls, ell: int, **overrides) -> "RewardConfig":
        c_min, c_max = COMPLEXITY_BOUNDS.get(ell, COMPLEXITY_BOUNDS[16])
        defaults = dict(
            row_reward=10.0 if ell >= 16 else 5.0,
            c_min=float(c_min),
            c_max=float(c_max),
            max_steps=default_max_steps(ell),
        )
        defaults.update(overrides)
        return cls(**defaults)

    @classmethod
    def from_file(cls, path: Union[str, Path], ell: int) -> "RewardConfig":
        """
        Reads a JSON object whose keys are field names of this class, on top of the
        defaults for kernel size `ell`.
        """

        overrides = json.loads(Path(path).read_text())
        return cls.for_size(ell, **check_keys(cls, overrides))

    def without_timeout(self) -> "RewardConfig":
        return replace(self, max_steps=None)


def check_keys(config_class, values: dict) -> dict:
    known = {item.name for item in fields(config_class)}
    unknown = sorted(set(values) - known)
    assert not unknown, f"Unknown {config_class.__name__} keys: {unknown}"
    return values


def calc_reward(complexity: float, config: RewardConfig) -> float:
    """
    r_min + (r_max - r_min) * ((C_max - C) / (C_max - C_min))^gamma, with C clamped
    into [C_min, C_max].
    """

    assert config.r_max is not None
    clamped = min(max(complexity, config.c_min), config.c_max)
    ratio = (config.c_max - clamped) / (config.c_max - config.c_min)
    return config.r_min + (config.r_max - config.r_min) * ratio**config.gamma
