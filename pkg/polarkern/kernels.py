"""
Reference kernels.
"""
from polarkern.gf2 import kron_power
from polarkern.models.binmatrix import BinMatrix, weight


F2 = BinMatrix.from_strings(["10", "11"])


def arikan(m: int) -> BinMatrix:
    """
    F2^{(x)m}.
    """

    return kron_power(F2, m)


def bit_reversed(index: int, bits: int) -> int:
    return int(format(index, f"0{bits}b")[::-1], 2) if bits else 0


def sorted_arikan(m: int) -> BinMatrix:
    """
    Sorted Arikan kernel S_{2^m}: the rows of F2^{(x)m} in bit-reversed order,
    stably sorted by ascending Hamming weight.

    For m = 2 this gives the rows 1000 / 1010 / 1100 / 1111.
    """

    base = arikan(m)
    reversed_rows = [base.rows[bit_reversed(index, m)] for index in range(base.n_rows)]
    return BinMatrix.from_ints(sorted(reversed_rows, key=weight), base.n_cols)


def sorted_arikan_bottom(ell: int, n_rows: int) -> BinMatrix:
    """
    The bottom `n_rows` rows of S_l, e.g. K_5 = S_16[11:15] for (16, 5).
    """

    m = ell.bit_length() - 1
    assert ell == 1 << m, f"Sorted Arikan kernels exist for powers of two only, got l = {ell}"
    assert 0 < n_rows <= ell, f"Cannot take {n_rows} rows of a size-{ell} kernel"
    return sorted_arikan(m).slice_rows(ell - n_rows, ell)
