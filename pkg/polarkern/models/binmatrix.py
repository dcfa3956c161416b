"""
Bit packing convention.

Every row is a python int used as a bitset: bit j of the int holds column j, so
column 0 (the leftmost character of the kernel text format) is the least
significant bit. With this convention the "start" of a row is its lowest set
bit and its "end" is its highest set bit.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from polarkern.exceptions import Gf2Error, KernelFormatError


def weight(bits: int) -> int:
    return bin(bits).count("1")


def lowest_bit(bits: int) -> int:
    return (bits & -bits).bit_length() - 1


def highest_bit(bits: int) -> int:
    return bits.bit_length() - 1


def bits_to_string(bits: int, length: int) -> str:
    return "".join("1" if (bits >> j) & 1 else "0" for j in range(length))


def string_to_bits(text: str) -> int:
    if any(char not in "01" for char in text):
        raise KernelFormatError(f"Only '0' and '1' are allowed in a binary row, got {text!r}")
    return sum(1 << j for j, char in enumerate(text) if char == "1")


@dataclass(frozen=True)
class BinVector:
    """
    A binary vector of `length` bits.
    """

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise Gf2Error(f"Vector length must be non-negative, got {self.length}")
        if self.bits < 0 or self.bits >> self.length:
            raise Gf2Error(f"Bits {self.bits:#x} do not fit in a vector of length {self.length}")

    @classmethod
    def from_bits(cls, values: Sequence[int]) -> "BinVector":
        return cls(len(values), sum(1 << j for j, value in enumerate(values) if value & 1))

    @classmethod
    def from_string(cls, text: str) -> "BinVector":
        return cls(len(text), string_to_bits(text))

    def __len__(self):
        return self.length

    def __getitem__(self, index: int) -> int:
        if not 0 <= index < self.length:
            raise Gf2Error(f"Index {index} out of range for a vector of length {self.length}")
        return (self.bits >> index) & 1

    def __xor__(self, other: "BinVector") -> "BinVector":
        if other.length != self.length:
            raise Gf2Error(f"Length mismatch: {self.length} != {other.length}")
        return BinVector(self.length, self.bits ^ other.bits)

    def __str__(self):
        return bits_to_string(self.bits, self.length)

    @property
    def weight(self) -> int:
        return weight(self.bits)

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.to_list(), dtype=np.uint8)


@dataclass(frozen=True)
class BinMatrix:
    """
    A binary matrix stored as one packed int per row.
    """

    n_rows: int
    n_cols: int
    rows: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_rows < 0 or self.n_cols < 0:
            raise Gf2Error(f"Invalid shape ({self.n_rows}, {self.n_cols})")
        if len(self.rows) != self.n_rows:
            raise Gf2Error(f"Expected {self.n_rows} rows, got {len(self.rows)}")
        for row in self.rows:
            if row < 0 or row >> self.n_cols:
                raise Gf2Error(f"Row {row:#x} does not fit in {self.n_cols} columns")

    @classmethod
    def from_ints(cls, rows: Iterable[int], n_cols: int) -> "BinMatrix":
        rows = tuple(rows)
        return cls(len(rows), n_cols, rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BinMatrix":
        n_cols = len(rows[0]) if rows else 0
        if any(len(row) != n_cols for row in rows):
            raise Gf2Error("All rows must have the same length")
        return cls.from_ints((BinVector.from_bits(row).bits for row in rows), n_cols)

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "BinMatrix":
        n_cols = len(lines[0]) if lines else 0
        if any(len(line) != n_cols for line in lines):
            raise KernelFormatError("All rows of a binary matrix must have the same length")
        return cls.from_ints((string_to_bits(line) for line in lines), n_cols)

    @classmethod
    def from_numpy(cls, array: np.ndarray) -> "BinMatrix":
        array = np.atleast_2d(np.asarray(array))
        return cls.from_rows(array.astype(int).tolist())

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BinMatrix":
        return cls(n_rows, n_cols, (0,) * n_rows)

    @classmethod
    def identity(cls, size: int) -> "BinMatrix":
        return cls(size, size, tuple(1 << j for j in range(size)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def __len__(self):
        return self.n_rows

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, index: tuple[int, int]) -> int:
        row, col = index
        self._check_row(row)
        if not 0 <= col < self.n_cols:
            raise Gf2Error(f"Column {col} out of range for {self.n_cols} columns")
        return (self.rows[row] >> col) & 1

    def __str__(self):
        return "\n".join(self.to_strings())

    def _check_row(self, row: int):
        if not 0 <= row < self.n_rows:
            raise Gf2Error(f"Row {row} out of range for {self.n_rows} rows")

    def row(self, index: int) -> BinVector:
        self._check_row(index)
        return BinVector(self.n_cols, self.rows[index])

    def slice_rows(self, start: int, stop: int) -> "BinMatrix":
        if not 0 <= start <= stop <= self.n_rows:
            raise Gf2Error(f"Row slice [{start}:{stop}] out of range for {self.n_rows} rows")
        return BinMatrix.from_ints(self.rows[start:stop], self.n_cols)

    def slice_cols(self, start: int, stop: int) -> "BinMatrix":
        if not 0 <= start <= stop <= self.n_cols:
            raise Gf2Error(f"Column slice [{start}:{stop}] out of range for {self.n_cols} columns")
        mask = (1 << (stop - start)) - 1
        return BinMatrix.from_ints(((row >> start) & mask for row in self.rows), stop - start)

    def append_column(self, column: Sequence[int]) -> "BinMatrix":
        if len(column) != self.n_rows:
            raise Gf2Error(f"Column of length {len(column)} does not match {self.n_rows} rows")
        return BinMatrix.from_ints(
            (row | ((bit & 1) << self.n_cols) for row, bit in zip(self.rows, column)),
            self.n_cols + 1,
        )

    def with_row(self, index: int, bits: int) -> "BinMatrix":
        self._check_row(index)
        rows = list(self.rows)
        rows[index] = bits
        return BinMatrix(self.n_rows, self.n_cols, tuple(rows))

    def to_strings(self) -> list[str]:
        return [bits_to_string(row, self.n_cols) for row in self.rows]

    def to_numpy(self) -> np.ndarray:
        array = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for index, row in enumerate(self.rows):
            array[index] = [(row >> j) & 1 for j in range(self.n_cols)]
        return array

    def row_weights(self) -> list[int]:
        return [weight(row) for row in self.rows]


def read_kernel(path: Union[str, Path]) -> BinMatrix:
    """
    Reads a matrix in the kernel text format: one row per line, characters '0'/'1'
    and no separators. The first blank line after the matrix terminates it.
    """

    lines: list[str] = []
    with Path(path).open("r") as file:
        for line in file:
            line = line.strip()
            if not line:
                if lines:
                    break
                continue
            lines.append(line)

    if not lines:
        raise KernelFormatError(f"No matrix rows found in {path}")
    return BinMatrix.from_strings(lines)


def write_kernel(path: Union[str, Path], kernel: BinMatrix) -> None:
    Path(path).write_text("\n".join(kernel.to_strings()) + "\n\n")
