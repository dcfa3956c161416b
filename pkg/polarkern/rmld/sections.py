from dataclasses import dataclass
from typing import Optional, Sequence

from polarkern.exceptions import Gf2Error
from polarkern.gf2 import (
    echelon_rows,
    gauss_jordan_in_place,
    multiply_rows,
    reduce_by_echelon,
    trellis_oriented_rows,
)
from polarkern.models.binmatrix import BinMatrix
from polarkern.rmld.tables import WvabTable, build_wvab


@dataclass(frozen=True)
class SectionParts:
    """
    Decomposition of the punctured code of sec(x:y).

    All matrices use section-local columns (column 0 is position x).
    `left_shortened` / `right_shortened` are the shortened codes of the two
    child sections expressed on the columns of this section.
    """

    x: int
    y: int
    shortened: BinMatrix
    left_shortened: BinMatrix
    right_shortened: BinMatrix
    w: BinMatrix
    v: BinMatrix

    @property
    def z(self) -> int:
        return (self.x + self.y) // 2

    @property
    def is_leaf(self) -> bool:
        return self.y - self.x == 1

    def punctured(self) -> BinMatrix:
        """
        The punctured generator stacked as [G^s_xz; G^s_zy; G^w; G^v].
        """

        return BinMatrix.from_ints(
            self.left_shortened.rows + self.right_shortened.rows + self.w.rows + self.v.rows,
            self.y - self.x,
        )


@dataclass(frozen=True)
class SectionNode:
    parts: SectionParts
    left: Optional["SectionNode"] = None
    right: Optional["SectionNode"] = None
    wvab: Optional[WvabTable] = None
    reuse_source: Optional[int] = None

    @property
    def x(self) -> int:
        return self.parts.x

    @property
    def y(self) -> int:
        return self.parts.y

    @property
    def z(self) -> int:
        return self.parts.z

    @property
    def is_leaf(self) -> bool:
        return self.parts.is_leaf

    @property
    def n_w(self) -> int:
        return self.parts.w.n_rows

    @property
    def n_v(self) -> int:
        return self.output_bits

    @property
    def output_bits(self) -> int:
        # a leaf outputs [+L_x, -L_x], i.e. it behaves like v = [1]
        return 1 if self.is_leaf else self.parts.v.n_rows

    @property
    def output_size(self) -> int:
        return 1 << self.output_bits

    def basis_rows(self) -> list[int]:
        """
        [G^s; G^v] of this section, the basis in which a parent expresses its rows.
        """

        if self.is_leaf:
            return [1]
        return list(self.parts.shortened.rows) + list(self.parts.v.rows)

    def shortened_rows(self) -> list[int]:
        return [] if self.is_leaf else list(self.parts.shortened.rows)

    def nodes(self):
        """
        Pre-order walk over the subtree.
        """

        yield self
        if self.left is not None and self.right is not None:
            yield from self.left.nodes()
            yield from self.right.nodes()


class TrellisView:
    """
    Trellis-oriented form of a generator matrix with every row's combination mask
    over the original rows, queried section by section.
    """

    def __init__(self, generator: BinMatrix):
        self.generator = generator
        oriented = trellis_oriented_rows(generator.rows)
        self.rows = [row for row, _ in oriented]
        self.masks = [mask for _, mask in oriented]

    def shortened_indices(self, x: int, y: int) -> list[int]:
        """
        Trellis-oriented rows supported inside [x, y). Leaves have none by convention.
        """

        if y - x <= 1:
            return []
        outside = ~(((1 << (y - x)) - 1) << x)
        return [index for index, row in enumerate(self.rows) if not row & outside]

    def restrict(self, row: int, x: int, y: int) -> int:
        return (row >> x) & ((1 << (y - x)) - 1)

    def combine(self, mask: int, x: int, y: int) -> int:
        return self.restrict(multiply_rows(mask, self.generator.rows), x, y)


def _clear_pivots(masks: list[int], reduced: Sequence[int], pivots: Sequence[int]) -> None:
    for pivot, row in zip(pivots, reduced):
        for index, mask in enumerate(masks):
            if (mask >> pivot) & 1:
                masks[index] = mask ^ row


def section_parts(view: TrellisView, x: int, y: int) -> SectionParts:
    width = y - x
    if width == 1:
        empty = BinMatrix.zeros(0, 1)
        return SectionParts(x, y, empty, empty, empty, empty, empty)

    z = (x + y) // 2
    shortened = view.shortened_indices(x, y)
    left = view.shortened_indices(x, z)
    right = view.shortened_indices(z, y)
    children = set(left) | set(right)
    w_indices = [index for index in shortened if index not in children]

    # v rows: punctured rows independent modulo the shortened code and earlier v rows
    echelon = echelon_rows([view.restrict(view.rows[index], x, y) for index in shortened])
    v_indices = []
    for index, row in enumerate(view.rows):
        if index in shortened:
            continue
        restricted = reduce_by_echelon(view.restrict(row, x, y), echelon)
        if restricted:
            v_indices.append(index)
            echelon = echelon_rows([pivot_row for _, pivot_row in echelon] + [restricted])

    # re-express w and v rows as combinations of original rows, child shortened rows eliminated
    child_masks = [view.masks[index] for index in left + right]
    child_pivots = gauss_jordan_in_place(child_masks)
    w_masks = [view.masks[index] for index in w_indices]
    v_masks = [view.masks[index] for index in v_indices]
    _clear_pivots(w_masks, child_masks, child_pivots)
    _clear_pivots(v_masks, child_masks, child_pivots)
    w_pivots = gauss_jordan_in_place(w_masks)
    _clear_pivots(v_masks, w_masks, w_pivots)
    gauss_jordan_in_place(v_masks)

    def local(indices: Sequence[int]) -> BinMatrix:
        return BinMatrix.from_ints((view.restrict(view.rows[i], x, y) for i in indices), width)

    return SectionParts(
        x=x,
        y=y,
        shortened=local(shortened),
        left_shortened=local(left),
        right_shortened=local(right),
        w=BinMatrix.from_ints((view.combine(mask, x, y) for mask in w_masks), width),
        v=BinMatrix.from_ints((view.combine(mask, x, y) for mask in v_masks), width),
    )


def build_punctured(generator: BinMatrix, x: int, y: int) -> SectionParts:
    """
    Decomposes the punctured code of sec(x:y) of a full-rank generator.

    Returns the shortened rows of the two child sections, the w rows (shortened in
    sec(x:y) but in neither child) and the v rows (punctured rows outside the
    shortened code). w and v rows are re-expressed as sums of the original rows
    of `generator` with the child shortened rows eliminated, so that each one
    corresponds to an original row where possible.
    """

    if not 0 <= x < y <= generator.n_cols:
        raise Gf2Error(f"Invalid section [{x}, {y}) for {generator.n_cols} columns")
    return section_parts(TrellisView(generator), x, y)


def build_section_tree(view: TrellisView, x: int, y: int, with_tables: bool = True) -> SectionNode:
    parts = section_parts(view, x, y)
    if parts.is_leaf:
        return SectionNode(parts)

    left = build_section_tree(view, x, parts.z, with_tables)
    right = build_section_tree(view, parts.z, y, with_tables)
    node = SectionNode(parts, left, right)
    if with_tables:
        node = SectionNode(parts, left, right, wvab=build_wvab(node, left, right))
    return node
