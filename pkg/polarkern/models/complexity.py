from dataclasses import dataclass, field


@dataclass(frozen=True)
class ComplexityReport:
    """
    Complexity ledger of a kernel decoder.

    `per_phase[i]` is the cost of the sec(0:l) tree of phase i; the total adds one
    final subtraction per phase, and a phase that reuses the max trees of an
    earlier phase contributes only that subtraction.
    """

    per_phase: tuple[int, ...]
    total: int
    reuse_enabled: bool
    reuse_map: dict[int, int] = field(default_factory=dict)

    @property
    def reused_phases(self) -> list[int]:
        return sorted(self.reuse_map)

    def to_json(self) -> dict:
        return {
            "per_phase": list(self.per_phase),
            "total": self.total,
            "reuse": self.reuse_enabled,
            "reuse_map": {str(phase): source for phase, source in sorted(self.reuse_map.items())},
        }
