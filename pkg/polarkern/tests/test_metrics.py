from itertools import product

import numpy as np
import pytest
from hamcrest import assert_that, close_to, contains_exactly, has_entries

from polarkern.exceptions import NonPolarizingKernelError, SingularMatrixError, UnsupportedSizeError
from polarkern.gf2 import permute_columns
from polarkern.kernels import arikan, sorted_arikan
from polarkern.metrics import (
    Pdp,
    error_exponent,
    is_kernel_valid,
    partial_distance_profile,
    target_pdp,
)
from polarkern.models.binmatrix import BinMatrix, read_kernel
from polarkern.tests.fixtures import get_fixture_path, random_kernel


TARGET_EXPONENTS = {
    5: 0.4307,
    6: 0.4513,
    7: 0.4580,
    8: 0.5000,
    9: 0.4616,
    10: 0.4692,
    11: 0.4775,
    12: 0.4825,
    13: 0.4883,
    14: 0.4910,
    15: 0.4978,
    16: 0.5183,
}


@pytest.mark.parametrize("ell, exponent", sorted(TARGET_EXPONENTS.items()))
def test_target_exponents(ell, exponent):
    assert_that(error_exponent(target_pdp(ell)).value, close_to(exponent, 1e-4))


@pytest.mark.parametrize("fixture", ["f4.txt", "s4.txt"])
def test_pdp_of_size_four_kernels(fixture):
    pdp = partial_distance_profile(read_kernel(get_fixture_path(fixture)))
    assert_that(list(pdp), contains_exactly(1, 2, 2, 4))
    assert float(pdp.exponent) == pytest.approx(0.5)


def test_pdp_of_f2():
    pdp = partial_distance_profile(read_kernel(get_fixture_path("f2.txt")))
    assert tuple(pdp) == (1, 2)
    assert pdp.exponent.value == pytest.approx(0.5)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_sorted_arikan_has_monotone_profile(m):
    pdp = partial_distance_profile(sorted_arikan(m))
    assert list(pdp) == sorted(pdp)
    assert pdp.exponent.value == pytest.approx(0.5)


def test_singular_kernel_has_no_pdp():
    with pytest.raises(SingularMatrixError):
        partial_distance_profile(BinMatrix.from_strings(["11", "11"]))


def test_unsupported_target_size():
    with pytest.raises(UnsupportedSizeError, match="Supported sizes"):
        target_pdp(3)
    with pytest.raises(UnsupportedSizeError):
        target_pdp(17)


def test_kernel_validity():
    assert is_kernel_valid(arikan(3), target_pdp(8)) is False
    assert is_kernel_valid(sorted_arikan(3), target_pdp(8))
    assert is_kernel_valid(arikan(2), target_pdp(4))


def test_pdp_to_json():
    assert_that(
        Pdp((1, 2, 2, 4)).to_json(),
        has_entries({"l": 4, "pdp": [1, 2, 2, 4], "exponent": 0.5}),
    )


def enumerated_partial_distances(kernel: BinMatrix) -> list[int]:
    array = kernel.to_numpy().astype(int)
    ell = array.shape[0]
    distances = []
    for index in range(ell):
        below = array[index + 1:]
        n_below = len(below)
        coefficients = np.array(list(product((0, 1), repeat=n_below)), dtype=int).reshape(2**n_below, n_below)
        codewords = coefficients @ below % 2
        distances.append(int(((codewords + array[index]) % 2).sum(axis=1).min()))
    return distances


@pytest.mark.parametrize("ell", [3, 4, 5, 6, 7, 8, 9, 10])
def test_pdp_matches_enumeration_over_the_span(ell):
    rng = np.random.default_rng(100 + ell)
    for _ in range(25):
        kernel = random_kernel(ell, rng)
        assert list(partial_distance_profile(kernel)) == enumerated_partial_distances(kernel)


@pytest.mark.parametrize("ell, seed", [(4, 0), (6, 1), (8, 2), (8, 3), (12, 4)])
def test_pdp_is_invariant_under_column_permutations(ell, seed):
    rng = np.random.default_rng(seed)
    kernel = random_kernel(ell, rng)
    pdp = partial_distance_profile(kernel)
    for _ in range(5):
        permutation = rng.permutation(ell).tolist()
        assert partial_distance_profile(permute_columns(kernel, permutation)) == pdp


@pytest.mark.parametrize(
    "kernel",
    [BinMatrix.identity(4), BinMatrix.from_strings(["11", "01"]), BinMatrix.from_strings(["111", "011", "001"])],
)
def test_error_exponent_rejects_non_polarizing_kernels(kernel):
    pdp = partial_distance_profile(kernel)
    assert set(pdp) == {1}
    with pytest.raises(NonPolarizingKernelError, match="does not polarize"):
        error_exponent(pdp)
