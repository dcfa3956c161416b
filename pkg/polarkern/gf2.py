"""
Linear algebra over GF(2) on bit-packed rows.

The public functions take and return `BinMatrix` / `BinVector` values. The
`*_rows` helpers work on plain lists of packed ints and are what the decoder
and the search loops call in their inner loops.
"""
from typing import Iterator, Optional, Sequence

from polarkern.exceptions import (
    DependentRowsError,
    EnumerationLimitError,
    Gf2Error,
    SingularMatrixError,
)
from polarkern.models.binmatrix import (
    BinMatrix,
    BinVector,
    highest_bit,
    lowest_bit,
    weight,
)


# Codeword enumeration is limited to 2^32 codewords
ENUMERATION_GUARD = 32


def echelon_rows(rows: Sequence[int]) -> list[tuple[int, int]]:
    """
    Forward elimination keyed on the lowest set bit.

    Returns (pivot, row) pairs, sorted by pivot, for an independent basis of the
    span of `rows`. Rows have no set bit below their pivot.
    """

    basis: dict[int, int] = {}
    for row in rows:
        while row:
            pivot = lowest_bit(row)
            if pivot not in basis:
                basis[pivot] = row
                break
            row ^= basis[pivot]
    return sorted(basis.items())


def reduce_by_echelon(vector: int, echelon: Sequence[tuple[int, int]]) -> int:
    for pivot, row in echelon:
        if (vector >> pivot) & 1:
            vector ^= row
    return vector


def rank_rows(rows: Sequence[int]) -> int:
    return len(echelon_rows(rows))


def rank(matrix: BinMatrix) -> int:
    return rank_rows(matrix.rows)


def reduced_row_echelon(matrix: BinMatrix) -> tuple[BinMatrix, list[int]]:
    """
    Returns the reduced row echelon form (zero rows dropped) and the pivot columns.
    """

    echelon = echelon_rows(matrix.rows)
    reduced = [row for _, row in echelon]
    for index in range(len(reduced) - 1, -1, -1):
        pivot = echelon[index][0]
        for other in range(index):
            if (reduced[other] >> pivot) & 1:
                reduced[other] ^= reduced[index]
    return BinMatrix.from_ints(reduced, matrix.n_cols), [pivot for pivot, _ in echelon]


def gauss_jordan_in_place(rows: list[int]) -> list[int]:
    """
    Gauss-Jordan elimination that keeps the row order.

    Each row in turn takes its lowest set bit as pivot, and that bit is cleared from
    every other row. The input rows must be independent. Returns the pivots.
    """

    pivots = []
    for index in range(len(rows)):
        if not rows[index]:
            raise DependentRowsError("Rows are linearly dependent")
        pivot = lowest_bit(rows[index])
        pivots.append(pivot)
        for other in range(len(rows)):
            if other != index and (rows[other] >> pivot) & 1:
                rows[other] ^= rows[index]
    return pivots


def trellis_oriented_rows(rows: Sequence[int]) -> list[tuple[int, int]]:
    """
    Minimum-span form of a full-rank generator matrix.

    Returns (row, mask) pairs sorted by start position, where `mask` records which
    of the input rows were summed to obtain the row (bit k = input row k).

    Forward elimination makes the start positions distinct, then, while two rows
    share an end position, the row with the later start is added to the others
    sharing that end. Starts are unchanged by the backward pass and ends only move
    left, so the loop terminates.
    """

    placed: dict[int, tuple[int, int]] = {}
    for index, row in enumerate(rows):
        mask = 1 << index
        while True:
            if not row:
                raise DependentRowsError(f"Row {index} is a combination of the rows above it")
            start = lowest_bit(row)
            if start not in placed:
                placed[start] = (row, mask)
                break
            other_row, other_mask = placed[start]
            row, mask = row ^ other_row, mask ^ other_mask

    result = [placed[start] for start in sorted(placed)]
    while True:
        by_end: dict[int, list[int]] = {}
        for position, (row, _) in enumerate(result):
            by_end.setdefault(highest_bit(row), []).append(position)
        collisions = sorted(end for end, positions in by_end.items() if len(positions) > 1)
        if not collisions:
            return result
        positions = by_end[collisions[-1]]
        # rows are sorted by start, so the last position has the latest start
        owner_row, owner_mask = result[positions[-1]]
        for position in positions[:-1]:
            row, mask = result[position]
            result[position] = (row ^ owner_row, mask ^ owner_mask)


def to_trellis_oriented(matrix: BinMatrix) -> BinMatrix:
    return BinMatrix.from_ints(
        (row for row, _ in trellis_oriented_rows(matrix.rows)), matrix.n_cols
    )


def span_bounds(matrix: BinMatrix) -> list[tuple[int, int]]:
    """
    (start, end) positions of every non-zero row.
    """

    return [(lowest_bit(row), highest_bit(row)) for row in matrix.rows if row]


def invert_square(matrix: BinMatrix) -> BinMatrix:
    if not matrix.is_square:
        raise Gf2Error(f"Only square matrices can be inverted, got shape {matrix.shape}")

    size = matrix.n_rows
    # the right half of every augmented row holds the identity part
    augmented = [row | (1 << (size + index)) for index, row in enumerate(matrix.rows)]
    for col in range(size):
        pivot_row = next(
            (index for index in range(col, size) if (augmented[index] >> col) & 1), None
        )
        if pivot_row is None:
            raise SingularMatrixError("Matrix is singular over GF(2)")
        augmented[col], augmented[pivot_row] = augmented[pivot_row], augmented[col]
        for index in range(size):
            if index != col and (augmented[index] >> col) & 1:
                augmented[index] ^= augmented[col]

    return BinMatrix.from_ints((row >> size for row in augmented), size)


def multiply_rows(vector: int, rows: Sequence[int]) -> int:
    """
    Product of a row vector (packed, bit k selects row k) with a matrix.
    """

    result = 0
    index = 0
    while vector:
        if vector & 1:
            result ^= rows[index]
        vector >>= 1
        index += 1
    return result


def multiply(left: BinMatrix, right: BinMatrix) -> BinMatrix:
    if left.n_cols != right.n_rows:
        raise Gf2Error(f"Cannot multiply shapes {left.shape} and {right.shape}")
    return BinMatrix.from_ints(
        (multiply_rows(row, right.rows) for row in left.rows), right.n_cols
    )


def kron(left: BinMatrix, right: BinMatrix) -> BinMatrix:
    rows = []
    for left_row in left.rows:
        for right_row in right.rows:
            row = 0
            for col in range(left.n_cols):
                if (left_row >> col) & 1:
                    row |= right_row << (col * right.n_cols)
            rows.append(row)
    return BinMatrix.from_ints(rows, left.n_cols * right.n_cols)


def kron_power(matrix: BinMatrix, power: int) -> BinMatrix:
    assert power >= 1, "Kronecker power must be at least 1"
    result = matrix
    for _ in range(power - 1):
        result = kron(matrix, result)
    return result


def permute_columns(matrix: BinMatrix, permutation: Sequence[int]) -> BinMatrix:
    """
    Column `j` of the output is column `permutation[j]` of the input.
    """

    if sorted(permutation) != list(range(matrix.n_cols)):
        raise Gf2Error("Not a permutation of the matrix columns")
    return BinMatrix.from_ints(
        (
            sum(((row >> source) & 1) << target for target, source in enumerate(permutation))
            for row in matrix.rows
        ),
        matrix.n_cols,
    )


def solve_in_basis(basis: Sequence[int], vector: int) -> list[int]:
    """
    Coordinates of `vector` in an independent `basis`, i.e. the bits x with
    vector = sum_k x_k basis[k].
    """

    echelon: dict[int, tuple[int, int]] = {}
    for index, row in enumerate(basis):
        mask = 1 << index
        while row:
            pivot = lowest_bit(row)
            if pivot not in echelon:
                echelon[pivot] = (row, mask)
                break
            other_row, other_mask = echelon[pivot]
            row, mask = row ^ other_row, mask ^ other_mask
        else:
            raise SingularMatrixError(f"Basis row {index} is dependent on the rows above it")

    coordinates = 0
    while vector:
        pivot = lowest_bit(vector)
        if pivot not in echelon:
            raise SingularMatrixError("Vector is outside the span of the basis")
        row, mask = echelon[pivot]
        vector ^= row
        coordinates ^= mask
    return [(coordinates >> index) & 1 for index in range(len(basis))]


def span_contains_rows(basis: Sequence[int], vectors: Sequence[int]) -> bool:
    echelon = echelon_rows(basis)
    return all(reduce_by_echelon(vector, echelon) == 0 for vector in vectors)


def span_contains(basis: BinMatrix, vectors: BinMatrix) -> bool:
    if basis.n_cols != vectors.n_cols:
        raise Gf2Error(f"Column mismatch: {basis.n_cols} != {vectors.n_cols}")
    return span_contains_rows(basis.rows, vectors.rows)


def same_row_space_rows(first: Sequence[int], second: Sequence[int]) -> bool:
    return span_contains_rows(first, second) and span_contains_rows(second, first)


def same_row_space(first: BinMatrix, second: BinMatrix) -> bool:
    return span_contains(first, second) and span_contains(second, first)


def iter_codeword_rows(rows: Sequence[int]) -> Iterator[int]:
    """
    Gray-code walk over the span of `rows`, starting at zero.
    """

    basis = [row for _, row in echelon_rows(rows)]
    codeword = 0
    yield codeword
    for step in range(1, 1 << len(basis)):
        codeword ^= basis[lowest_bit(step)]
        yield codeword


def enumerate_codewords(generator: BinMatrix) -> Iterator[BinVector]:
    if generator.n_rows > ENUMERATION_GUARD:
        raise EnumerationLimitError(
            f"Enumerating a code with {generator.n_rows} rows exceeds the guard of "
            f"{ENUMERATION_GUARD} rows; use list-based distance estimation instead"
        )
    for codeword in iter_codeword_rows(generator.rows):
        yield BinVector(generator.n_cols, codeword)


def coset_distance_rows(target: int, rows: Sequence[int], bound: Optional[int] = None) -> int:
    """
    min over codewords c in the span of `rows` of the Hamming distance d(target, c).

    Depth-first branch-and-bound over an echelon basis. Once the rows with the
    first j pivots are decided, every column before the next pivot is final, so
    the distance accumulated on that prefix is a lower bound for the subtree.

    With `bound` set, the search stops as soon as a distance not above `bound` is
    found; the result is then only known to be at most `bound`, which is enough to
    reject a row against a target distance.
    """

    echelon = echelon_rows(rows)
    pivots = [pivot for pivot, _ in echelon] + [None]
    basis = [row for _, row in echelon]
    best = weight(target)
    floor = -1 if bound is None else bound

    def prefix_mask(position: Optional[int]) -> int:
        return -1 if position is None else (1 << position) - 1

    masks = [prefix_mask(pivot) for pivot in pivots[1:]]

    def search(depth: int, residual: int):
        nonlocal best
        if depth == len(basis):
            best = min(best, weight(residual))
            return
        for take in (False, True):
            candidate = residual ^ basis[depth] if take else residual
            if weight(candidate & masks[depth]) < best:
                search(depth + 1, candidate)
            if best <= floor:
                return

    if basis and best > floor:
        search(0, target)
    return best


def min_coset_distance(target: BinVector, generator: BinMatrix) -> int:
    if target.length != generator.n_cols:
        raise Gf2Error(
            f"Vector length {target.length} does not match {generator.n_cols} columns"
        )
    return coset_distance_rows(target.bits, generator.rows)
