"""Linear algebra over GF(2) on bit-packed Python integers.

A bit vector is a plain ``int``; bit ``i`` holds coordinate ``i``.  Python
integers are arbitrary precision and store their magnitude in machine words,
so XOR/AND/popcount run word-parallel without any extra packing layer.

A :class:`BitMatrix` is a list of such row integers plus a column count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


def popcount(v: int) -> int:
    return v.bit_count()


def parity(v: int) -> int:
    return v.bit_count() & 1


def iter_bits(v: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``v`` in increasing order."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def from_bits(bits: Iterable[int]) -> int:
    """Pack a sequence of 0/1 values (index 0 first) into an int."""
    v = 0
    for i, b in enumerate(bits):
        if b:
            v |= 1 << i
    return v


def to_bits(v: int, length: int) -> list[int]:
    return [(v >> i) & 1 for i in range(length)]


def bit_string(v: int, length: int) -> str:
    """Render as ``'0101...'`` with index 0 leftmost."""
    return "".join("1" if (v >> i) & 1 else "0" for i in range(length))


def parse_bit_string(text: str) -> int:
    v = 0
    for i, ch in enumerate(text):
        if ch == "1":
            v |= 1 << i
        elif ch != "0":
            raise ValueError(f"invalid bit character {ch!r}")
    return v


def lex_rank(v: int, length: int) -> int:
    """Integer whose natural order is the lexicographic order of (v_0, v_1, ...)."""
    if length == 0:
        return 0
    return int(format(v, f"0{length}b")[::-1], 2)


@dataclass
class BitMatrix:
    rows: list[int]
    n_cols: int
    _mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._mask = (1 << self.n_cols) - 1
        for r in self.rows:
            if r < 0 or r > self._mask:
                raise ValueError("row wider than n_cols")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> BitMatrix:
        return cls([0] * n_rows, n_cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls([1 << i for i in range(n)], n)

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]], n_cols: int | None = None) -> BitMatrix:
        if n_cols is None:
            n_cols = len(data[0]) if data else 0
        return cls([from_bits(r) for r in data], n_cols)

    def to_lists(self) -> list[list[int]]:
        return [to_bits(r, self.n_cols) for r in self.rows]

    def get(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def column(self, j: int) -> int:
        v = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                v |= 1 << i
        return v

    def transpose(self) -> BitMatrix:
        return BitMatrix([self.column(j) for j in range(self.n_cols)], self.n_rows)

    def mul_vec(self, x: int) -> int:
        """Return ``M x`` as a bit vector of length ``n_rows``."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r & x).bit_count() & 1:
                out |= 1 << i
        return out

    def matmul(self, other: BitMatrix) -> BitMatrix:
        if self.n_cols != other.n_rows:
            raise ValueError("shape mismatch")
        out = []
        for r in self.rows:
            acc = 0
            for k in iter_bits(r):
                acc ^= other.rows[k]
            out.append(acc)
        return BitMatrix(out, other.n_cols)

    def copy(self) -> BitMatrix:
        return BitMatrix(list(self.rows), self.n_cols)


def echelonize(m: BitMatrix) -> tuple[BitMatrix, int, list[int]]:
    """Reduced row echelon form.

    Pivots are taken at the lowest available column and, within a column, at
    the lowest-index remaining row, so the output is fully deterministic.
    Zero rows are kept at the bottom so the shape is unchanged.
    """
    rows = list(m.rows)
    pivots: list[int] = []
    r = 0
    for col in range(m.n_cols):
        bit = 1 << col
        sel = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return BitMatrix(rows, m.n_cols), r, pivots


def rank(m: BitMatrix) -> int:
    """Rank via a pivot dictionary; cheaper than a full echelon form."""
    basis: dict[int, int] = {}
    for row in m.rows:
        while row:
            top = row.bit_length() - 1
            if top in basis:
                row ^= basis[top]
            else:
                basis[top] = row
                break
    return len(basis)


def nullspace(m: BitMatrix) -> list[int]:
    """Basis of the right kernel ``{x : M x = 0}``, one vector per free column."""
    red, rk, pivots = echelonize(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.n_cols):
        if free in pivot_set:
            continue
        v = 1 << free
        for i in range(rk):
            if (red.rows[i] >> free) & 1:
                v |= 1 << pivots[i]
        basis.append(v)
    return basis


def solve_particular(m: BitMatrix, b: int) -> int | None:
    """Some ``x`` with ``M x = b``, or ``None`` when the system is inconsistent."""
    n = m.n_cols
    aug = BitMatrix([r | (((b >> i) & 1) << n) for i, r in enumerate(m.rows)], n + 1)
    red, rk, pivots = echelonize(aug)
    if pivots and pivots[-1] == n:
        return None
    x = 0
    for i in range(rk):
        if (red.rows[i] >> n) & 1:
            x |= 1 << pivots[i]
    return x


def is_invertible(m: BitMatrix) -> bool:
    return m.n_rows == m.n_cols and rank(m) == m.n_cols


def inverse(m: BitMatrix) -> BitMatrix:
    n = m.n_cols
    if m.n_rows != n:
        raise ValueError("matrix is not square")
    aug = BitMatrix([r | (1 << (n + i)) for i, r in enumerate(m.rows)], 2 * n)
    red, rk, pivots = echelonize(aug)
    if rk < n or pivots[n - 1] != n - 1:
        raise ValueError("matrix is singular")
    return BitMatrix([r >> n for r in red.rows], n)
