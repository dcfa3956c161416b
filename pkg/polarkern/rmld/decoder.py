from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from polarkern.exceptions import Gf2Error, SingularMatrixError, UnsupportedSizeError
from polarkern.gf2 import rank, same_row_space_rows, span_contains_rows
from polarkern.models.binmatrix import BinMatrix
from polarkern.models.complexity import ComplexityReport
from polarkern.rmld.complexity import complexity_report
from polarkern.rmld.extended import extend_kernel
from polarkern.rmld.sections import SectionNode, TrellisView, build_section_tree


MAX_DECODER_SIZE = 32


@dataclass(frozen=True, eq=False)
class RmldDecoder:
    """
    Per-phase RMLD trees of a kernel.

    `phase_trees[i]` is the sec(0:l) tree built from the extended kernel of phase i.
    `reuse_map` maps a phase to the earlier phase whose top-section max trees it
    shares; it only affects the complexity ledger, every phase is decoded on its
    own tree.
    """

    kernel: BinMatrix
    phase_trees: tuple[SectionNode, ...]
    reuse_map: dict[int, int]
    complexity: ComplexityReport
    kernel_array: np.ndarray

    @property
    def ell(self) -> int:
        return self.kernel.n_rows

    @property
    def reuse_enabled(self) -> bool:
        return self.complexity.reuse_enabled


def build_phase_tree(kernel: BinMatrix, phase: int, with_tables: bool = True) -> SectionNode:
    extended = extend_kernel(kernel, phase)
    return build_section_tree(TrellisView(extended.base), 0, kernel.n_rows, with_tables)


def _top_section_rows(tree: SectionNode) -> list[int]:
    return list(tree.parts.w.rows) + list(tree.parts.v.rows)


def can_reuse(later: SectionNode, earlier: SectionNode) -> bool:
    """
    Top-section max trees of `earlier` serve `later` when both see the same child
    shortened codes and the w/v rows of `later` lie in the span of those of `earlier`.
    """

    if later.is_leaf or earlier.is_leaf:
        return False
    assert later.left is not None and later.right is not None
    assert earlier.left is not None and earlier.right is not None
    return (
        same_row_space_rows(later.left.shortened_rows(), earlier.left.shortened_rows())
        and same_row_space_rows(later.right.shortened_rows(), earlier.right.shortened_rows())
        and span_contains_rows(_top_section_rows(earlier), _top_section_rows(later))
    )


def find_reuse(phase_trees: Sequence[SectionNode]) -> dict[int, int]:
    """
    For every phase, the most recent compatible earlier phase, re-pointed along
    chains to the phase that actually owns the max trees.
    """

    reuse_map: dict[int, int] = {}
    for later in range(1, len(phase_trees)):
        for earlier in range(later - 1, -1, -1):
            if can_reuse(phase_trees[later], phase_trees[earlier]):
                reuse_map[later] = reuse_map.get(earlier, earlier)
                break
    return reuse_map


def _check_kernel(kernel: BinMatrix) -> None:
    if not kernel.is_square:
        raise Gf2Error(f"A kernel must be square, got shape {kernel.shape}")
    if not 2 <= kernel.n_rows <= MAX_DECODER_SIZE:
        raise UnsupportedSizeError(
            f"RMLD decoders support 2 <= l <= {MAX_DECODER_SIZE}, got {kernel.n_rows}"
        )
    if rank(kernel) != kernel.n_rows:
        raise SingularMatrixError("Cannot build a decoder for a singular kernel")


def build_decoder(kernel: BinMatrix, reuse: bool = True, with_tables: bool = True) -> RmldDecoder:
    """
    Builds the RMLD trees of every phase and the complexity ledger.

    `with_tables=False` skips the wvab tables; the result can then only be used for
    complexity accounting.
    """

    _check_kernel(kernel)
    phase_trees = tuple(
        build_phase_tree(kernel, phase, with_tables) for phase in range(kernel.n_rows)
    )
    reuse_map = find_reuse(phase_trees) if reuse else {}
    phase_trees = tuple(
        SectionNode(tree.parts, tree.left, tree.right, tree.wvab, reuse_map.get(phase))
        for phase, tree in enumerate(phase_trees)
    )
    return RmldDecoder(
        kernel=kernel,
        phase_trees=phase_trees,
        reuse_map=reuse_map,
        complexity=complexity_report(phase_trees, reuse_map, reuse),
        kernel_array=kernel.to_numpy(),
    )


def decoder_complexity(decoder: RmldDecoder) -> ComplexityReport:
    return decoder.complexity


@lru_cache(maxsize=65536)
def _cached_complexity(rows: tuple[int, ...], reuse: bool) -> ComplexityReport:
    kernel = BinMatrix.from_ints(rows, len(rows))
    return build_decoder(kernel, reuse=reuse, with_tables=False).complexity


def kernel_complexity(kernel: BinMatrix, reuse: bool = True) -> ComplexityReport:
    """
    Complexity ledger without building wvab tables, memoized on the kernel rows.
    """

    return _cached_complexity(kernel.rows, reuse)


def compare_reuse(kernel: BinMatrix) -> dict:
    with_reuse = kernel_complexity(kernel, reuse=True)
    without_reuse = kernel_complexity(kernel, reuse=False)
    return {
        "with_reuse": with_reuse,
        "without_reuse": without_reuse,
        "saving": 1 - with_reuse.total / without_reuse.total,
    }


def _evaluate(node: SectionNode, llrs: np.ndarray) -> np.ndarray:
    """
    T_xy for a batch: shape (batch, 2^|v|).
    """

    if node.is_leaf:
        column = llrs[:, node.x]
        return np.stack([column, -column], axis=1)

    assert node.left is not None and node.right is not None and node.wvab is not None
    left = _evaluate(node.left, llrs)
    right = _evaluate(node.right, llrs)
    # (batch, 2^|v|, 2^|w|), maximized over w
    sums = left[:, node.wvab.a_index] + right[:, node.wvab.b_index]
    return sums.max(axis=2)


def decode_phase_batch(
    decoder: RmldDecoder, phase: int, llrs: np.ndarray, priors: np.ndarray
) -> np.ndarray:
    """
    Soft output of phase `phase` for every row of `llrs` (shape (batch, l)), given
    the decided bits u_0..u_{phase-1} of each row in `priors` (shape (batch, phase)).

    The prior decisions enter as the coset shift c = u_0^{i-1} K[0:i]: the LLR of
    every position where c is one is negated before the tree is evaluated.
    """

    llrs = np.asarray(llrs, dtype=float)
    priors = np.asarray(priors, dtype=np.int64)
    if priors.ndim == 1:
        priors = priors[None, :]
    if not 0 <= phase < decoder.ell:
        raise Gf2Error(f"Phase {phase} out of range for a kernel of size {decoder.ell}")
    if llrs.ndim != 2 or llrs.shape[1] != decoder.ell:
        raise Gf2Error(f"Expected LLRs of shape (batch, {decoder.ell}), got {llrs.shape}")
    if priors.shape != (llrs.shape[0], phase):
        raise Gf2Error(f"Phase {phase} needs priors of shape ({llrs.shape[0]}, {phase}), got {priors.shape}")

    if phase:
        shift = (priors @ decoder.kernel_array[:phase].astype(np.int64)) & 1
        llrs = llrs * (1 - 2 * shift)
    table = _evaluate(decoder.phase_trees[phase], llrs)
    return (table[:, 0] - table[:, 1]) / 2


def decode_phase(
    decoder: RmldDecoder, phase: int, llrs: Sequence[float], priors: Sequence[int] = ()
) -> float:
    result = decode_phase_batch(
        decoder,
        phase,
        np.asarray(llrs, dtype=float).reshape(1, -1),
        np.asarray(priors, dtype=np.int64).reshape(1, -1),
    )
    return float(result[0])


def decode_kernel_batch(
    decoder: RmldDecoder, llrs: np.ndarray, frozen: Optional[Sequence[int]] = None
) -> tuple[np.ndarray, np.ndarray]:
    llrs = np.asarray(llrs, dtype=float)
    frozen_mask = np.zeros(decoder.ell, dtype=bool) if frozen is None else np.asarray(frozen, dtype=bool)
    if frozen_mask.shape != (decoder.ell,):
        raise Gf2Error(f"Frozen mask must have {decoder.ell} entries, got {frozen_mask.shape}")

    decisions = np.zeros(llrs.shape, dtype=np.int64)
    soft = np.zeros(llrs.shape, dtype=float)
    for phase in range(decoder.ell):
        soft[:, phase] = decode_phase_batch(decoder, phase, llrs, decisions[:, :phase])
        if not frozen_mask[phase]:
            decisions[:, phase] = soft[:, phase] <= 0
    return decisions, soft


def decode_kernel(
    decoder: RmldDecoder, llrs: Sequence[float], frozen: Optional[Sequence[int]] = None
) -> tuple[list[int], list[float]]:
    """
    Successive decoding of phases 0..l-1: u_i = 0 when frozen or when the soft
    output is positive, else 1.
    """

    decisions, soft = decode_kernel_batch(
        decoder, np.asarray(llrs, dtype=float).reshape(1, -1), frozen
    )
    return decisions[0].tolist(), soft[0].tolist()
