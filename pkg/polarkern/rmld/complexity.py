from typing import Mapping, Sequence

from polarkern.models.complexity import ComplexityReport
from polarkern.rmld.sections import SectionNode


def comb_complexity(w_count: int, v_count: int) -> int:
    """
    Summations and comparisons needed to combine two child tables:
    2^(|w|+|v|) sums plus sum_{k=1}^{|w|} 2^k comparisons.
    """

    assert w_count >= 0 and v_count >= 0, "Label counts must be non-negative"
    return (1 << (w_count + v_count)) + sum(1 << k for k in range(1, w_count + 1))


def section_complexity(node: SectionNode) -> int:
    if node.is_leaf:
        return 0
    assert node.left is not None and node.right is not None
    return (
        section_complexity(node.left)
        + section_complexity(node.right)
        + comb_complexity(node.n_w, node.parts.v.n_rows)
    )


def complexity_report(
    phase_trees: Sequence[SectionNode],
    reuse_map: Mapping[int, int],
    reuse_enabled: bool,
) -> ComplexityReport:
    per_phase = tuple(section_complexity(tree) for tree in phase_trees)
    total = sum(
        1 if phase in reuse_map else cost + 1 for phase, cost in enumerate(per_phase)
    )
    return ComplexityReport(
        per_phase=per_phase,
        total=total,
        reuse_enabled=reuse_enabled,
        reuse_map=dict(reuse_map),
    )
