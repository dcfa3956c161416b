from polarkern.models.binmatrix import BinMatrix, BinVector  # noqa: F401
from polarkern.models.complexity import ComplexityReport  # noqa: F401
from polarkern.models.episode import Episode, EpisodeOutcome, Step  # noqa: F401
