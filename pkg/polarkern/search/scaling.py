from dataclasses import dataclass
from typing import Sequence

import numpy as np

from polarkern.exceptions import DegenerateFitError


# Minimum and maximum RMLD complexity reached by 10K random-agent iterations, per size
RANDOM_AGENT_REFERENCE: dict[int, tuple[int, int]] = {
    4: (32, 44),
    5: (57, 93),
    6: (88, 158),
    7: (121, 249),
    8: (156, 340),
    9: (291, 603),
    10: (356, 854),
    11: (607, 1311),
    12: (888, 1834),
    13: (1137, 2731),
    14: (1686, 3758),
    15: (2245, 5669),
    16: (3338, 7886),
}


@dataclass(frozen=True)
class ScalingFit:
    """
    C ~ 2^(slope * l + intercept).
    """

    slope: float
    intercept: float

    def predict(self, ell: float) -> float:
        return float(2 ** (self.slope * ell + self.intercept))

    def to_json(self) -> dict:
        return {"slope": round(self.slope, 4), "intercept": round(self.intercept, 4)}


def fit_complexity_scaling(samples: Sequence[tuple[float, float]]) -> ScalingFit:
    """
    Least-squares fit of log2(C) against l.
    """

    sizes = np.array([ell for ell, _ in samples], dtype=float)
    complexities = np.array([complexity for _, complexity in samples], dtype=float)
    if len(np.unique(sizes)) < 2:
        raise DegenerateFitError("At least two distinct kernel sizes are needed for a scaling fit")
    if np.any(complexities <= 0):
        raise DegenerateFitError("Complexities must be positive")

    slope, intercept = np.polyfit(sizes, np.log2(complexities), deg=1)
    return ScalingFit(slope=float(slope), intercept=float(intercept))


def reference_samples(which: str = "max") -> list[tuple[int, int]]:
    assert which in ("min", "max"), "`which` must be 'min' or 'max'"
    position = 0 if which == "min" else 1
    return [(ell, bounds[position]) for ell, bounds in sorted(RANDOM_AGENT_REFERENCE.items())]


def predict_complexity(fit: ScalingFit, ell: float) -> float:
    return fit.predict(ell)
