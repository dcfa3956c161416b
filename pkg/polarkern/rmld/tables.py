from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, NamedTuple

import numpy as np

from polarkern.gf2 import multiply_rows, solve_in_basis
from polarkern.models.binmatrix import BinMatrix


if TYPE_CHECKING:
    from polarkern.rmld.sections import SectionNode


class WvabRow(NamedTuple):
    w: tuple[int, ...]
    v: tuple[int, ...]
    a: tuple[int, ...]
    b: tuple[int, ...]


def bits_big_endian(value: int, length: int) -> tuple[int, ...]:
    return tuple((value >> (length - 1 - k)) & 1 for k in range(length))


def dec(bits: tuple[int, ...]) -> int:
    """
    Index of a coset label; the first bit is the least significant one.
    """

    return sum(bit << k for k, bit in enumerate(bits))


@dataclass(frozen=True, eq=False)
class WvabTable:
    """
    Mapping from the (w, v) labels of a section to the (a, b) labels of its children.

    Row r of the table is [w, v] read as a big-endian integer (w_0 is the most
    significant bit). `a_index[dec(v), w]` and `b_index[dec(v), w]` hold dec(a)
    and dec(b), which is the layout the decoder maximizes over.
    """

    n_w: int
    n_v: int
    g_hat: BinMatrix
    g_tilde: BinMatrix
    a: np.ndarray
    b: np.ndarray
    a_index: np.ndarray
    b_index: np.ndarray

    def __len__(self):
        return 1 << (self.n_w + self.n_v)

    def rows(self) -> Iterator[WvabRow]:
        for r in range(len(self)):
            w = bits_big_endian(r >> self.n_v, self.n_w)
            v = bits_big_endian(r & ((1 << self.n_v) - 1), self.n_v)
            yield WvabRow(
                w=w,
                v=v,
                a=tuple(int(bit) for bit in self.a[r]),
                b=tuple(int(bit) for bit in self.b[r]),
            )


def child_coordinates(rows: list[int], basis: list[int]) -> list[int]:
    """
    Coordinates of every row in a child basis, packed so that bit k is coordinate k.
    """

    return [dec(tuple(solve_in_basis(basis, row))) for row in rows]


def build_wvab(node: "SectionNode", left: "SectionNode", right: "SectionNode") -> WvabTable:
    """
    Tabulates a = v-part of [w, v] G_hat and b = v-part of [w, v] G_tilde for every label.

    G_hat and G_tilde express the rows [G^w; G^v] of the section in the child
    bases [G^s_xz; G^v_xz] and [G^s_zy; G^v_zy]; the leading shortened
    coordinates are discarded because the child tables already maximize over them.
    """

    left_width = node.z - node.x
    stacked = list(node.parts.w.rows) + list(node.parts.v.rows)
    left_basis, right_basis = left.basis_rows(), right.basis_rows()

    g_hat_rows = child_coordinates(
        [row & ((1 << left_width) - 1) for row in stacked], left_basis
    )
    g_tilde_rows = child_coordinates(
        [row >> left_width for row in stacked], right_basis
    )
    n_w, n_v = node.n_w, node.parts.v.n_rows
    n_labels = n_w + n_v
    left_shift = len(left_basis) - left.output_bits
    right_shift = len(right_basis) - right.output_bits

    size = 1 << n_labels
    a = np.zeros((size, left.output_bits), dtype=np.uint8)
    b = np.zeros((size, right.output_bits), dtype=np.uint8)
    a_index = np.zeros((1 << n_v, 1 << n_w), dtype=np.int64)
    b_index = np.zeros((1 << n_v, 1 << n_w), dtype=np.int64)

    for r in range(size):
        labels = bits_big_endian(r, n_labels)
        selection = dec(labels)
        a_value = multiply_rows(selection, g_hat_rows) >> left_shift
        b_value = multiply_rows(selection, g_tilde_rows) >> right_shift
        a[r] = [(a_value >> k) & 1 for k in range(left.output_bits)]
        b[r] = [(b_value >> k) & 1 for k in range(right.output_bits)]

        v_labels = labels[n_w:]
        w_value = r >> n_v
        a_index[dec(v_labels), w_value] = a_value
        b_index[dec(v_labels), w_value] = b_value

    return WvabTable(
        n_w=n_w,
        n_v=n_v,
        g_hat=BinMatrix.from_ints(g_hat_rows, len(left_basis)),
        g_tilde=BinMatrix.from_ints(g_tilde_rows, len(right_basis)),
        a=a,
        b=b,
        a_index=a_index,
        b_index=b_index,
    )
