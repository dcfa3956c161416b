import numpy as np
import pytest
from hamcrest import assert_that, contains_exactly

from polarkern.exceptions import Gf2Error
from polarkern.gf2 import multiply_rows, span_contains_rows
from polarkern.kernels import F2, arikan, sorted_arikan, sorted_arikan_bottom
from polarkern.metrics import row_partial_distances, target_pdp
from polarkern.models.binmatrix import read_kernel
from polarkern.rmld import build_punctured, extend_kernel
from polarkern.rmld.decoder import build_phase_tree
from polarkern.rmld.tables import dec
from polarkern.tests.fixtures import get_fixture_path, random_kernel


F4 = arikan(2)

F4_PHASE1_TABLE = [
    ((0, 0), (0,), (0, 0), (0, 0)),
    ((0, 0), (1,), (0, 1), (0, 0)),
    ((0, 1), (0,), (0, 1), (0, 1)),
    ((0, 1), (1,), (0, 0), (0, 1)),
    ((1, 0), (0,), (1, 0), (1, 0)),
    ((1, 0), (1,), (1, 1), (1, 0)),
    ((1, 1), (0,), (1, 1), (1, 1)),
    ((1, 1), (1,), (1, 0), (1, 1)),
]

F2_PHASE0_TABLE = [
    ((0,), (0,), (0,), (0,)),
    ((0,), (1,), (1,), (0,)),
    ((1,), (0,), (1,), (1,)),
    ((1,), (1,), (0,), (1,)),
]


def test_reference_kernels_match_fixtures():
    assert arikan(1) == read_kernel(get_fixture_path("f2.txt"))
    assert arikan(2) == read_kernel(get_fixture_path("f4.txt"))
    assert sorted_arikan(2) == read_kernel(get_fixture_path("s4.txt"))


def test_sorted_arikan_bottom_rows_match_target_suffix():
    rows = sorted_arikan_bottom(16, 5)
    assert rows.shape == (5, 16)
    assert tuple(row_partial_distances(rows.rows)) == target_pdp(16).suffix(5)


@pytest.mark.parametrize(
    "kernel, phase, expected",
    [
        (F2, 0, ["101", "110"]),
        (F4, 1, ["11001", "10100", "11110"]),
        (F4, 3, ["11111"]),
    ],
)
def test_extend_kernel(kernel, phase, expected):
    extended = extend_kernel(kernel, phase)
    assert extended.base.to_strings() == expected
    assert extended.phase == phase


def test_extended_kernel_reconstructs_source_rows():
    kernel = random_kernel(6, np.random.default_rng(3))
    for phase in range(6):
        extended = extend_kernel(kernel, phase)
        assert kernel.rows[:phase] + extended.kernel_rows().rows == kernel.rows
        assert [(row >> 6) & 1 for row in extended.base.rows] == [1] + [0] * (5 - phase)


def test_extend_kernel_phase_out_of_range():
    with pytest.raises(Gf2Error):
        extend_kernel(F4, 4)


def test_punctured_code_of_f4_phase0():
    parts = build_punctured(extend_kernel(F4, 0).base, 0, 4)
    assert_that(parts.punctured().to_strings(), contains_exactly("1100", "0011", "1010", "1000"))
    assert parts.left_shortened.to_strings() == ["1100"]
    assert parts.right_shortened.to_strings() == ["0011"]
    assert (parts.w.n_rows, parts.v.n_rows) == (1, 1)


def test_punctured_code_of_f4_phase1():
    parts = build_punctured(extend_kernel(F4, 1).base, 0, 4)
    assert_that(parts.punctured().to_strings(), contains_exactly("1010", "1111", "1100"))
    assert (parts.w.n_rows, parts.v.n_rows) == (2, 1)


def test_single_column_section_is_a_leaf():
    parts = build_punctured(extend_kernel(F4, 0).base, 2, 3)
    assert parts.is_leaf
    assert parts.punctured().n_rows == 0


def test_invalid_section_bounds():
    with pytest.raises(Gf2Error):
        build_punctured(extend_kernel(F4, 0).base, 3, 3)


def test_wvab_of_f4_phase1():
    table = build_phase_tree(F4, 1).wvab
    assert table.g_hat.to_strings() == ["10", "01", "01"]
    assert table.g_tilde.to_strings() == ["10", "01", "00"]
    assert [tuple(row) for row in table.rows()] == F4_PHASE1_TABLE


def test_wvab_of_f2_phase0():
    table = build_phase_tree(F2, 0).wvab
    assert len(table) == 4
    assert [tuple(row) for row in table.rows()] == F2_PHASE0_TABLE


@pytest.mark.parametrize("kernel", [F4, sorted_arikan(2), arikan(3), random_kernel(8, np.random.default_rng(11))])
def test_section_tree_invariants(kernel):
    ell = kernel.n_rows
    for phase in range(ell):
        tree = build_phase_tree(kernel, phase)
        assert tree.parts.v.n_rows == 1
        for node in tree.nodes():
            if node.is_leaf:
                assert node.output_size == 2
                continue
            assert len(node.wvab) == 1 << (node.n_w + node.parts.v.n_rows)
            assert node.wvab.a_index.shape == (node.output_size, 1 << node.n_w)


@pytest.mark.parametrize("kernel", [F4, arikan(3), random_kernel(8, np.random.default_rng(5))])
def test_wvab_rows_follow_from_child_bases(kernel):
    for phase in range(kernel.n_rows):
        for node in build_phase_tree(kernel, phase).nodes():
            if node.is_leaf:
                continue
            left, right = node.left, node.right
            width = node.z - node.x
            stacked = list(node.parts.w.rows) + list(node.parts.v.rows)
            left_basis, right_basis = left.basis_rows(), right.basis_rows()
            left_shift = len(left_basis) - left.output_bits
            right_shift = len(right_basis) - right.output_bits
            for row in node.wvab.rows():
                selection = dec(row.w + row.v)
                word = multiply_rows(selection, stacked)
                # the a / b labels select the child v rows, the rest is in the child shortened code
                left_word = word & ((1 << width) - 1)
                right_word = word >> width
                left_v = multiply_rows(dec(row.a) << left_shift, left_basis)
                right_v = multiply_rows(dec(row.b) << right_shift, right_basis)
                assert_in_span(left_word ^ left_v, left.shortened_rows())
                assert_in_span(right_word ^ right_v, right.shortened_rows())


def assert_in_span(vector, rows):
    assert span_contains_rows(rows, [vector])
