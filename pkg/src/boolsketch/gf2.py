"""Linear algebra over GF(2) on bit-packed rows.

Rows and vectors are plain Python ints used as bitsets: bit ``j`` of a row
holds the entry in column ``j``. Python ints are arbitrary precision, so a
row of any width costs one object and XOR of two rows is a single operation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, SolutionCountExceeded

__all__ = [
    "BitMatrix",
    "bits_to_int",
    "int_to_bits",
    "rank",
    "rref",
    "nullspace",
    "solve_affine_all",
    "mat_vec",
    "linearly_independent",
]


def bits_to_int(bits: Iterable[int]) -> int:
    """Pack a 0/1 sequence into an int, first entry in bit 0."""
    v = 0
    for j, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"entry {j} is {b!r}, expected 0 or 1")
        if b:
            v |= 1 << j
    return v


def int_to_bits(v: int, length: int) -> np.ndarray:
    if v < 0 or v.bit_length() > length:
        raise DimensionMismatch(f"value does not fit in {length} bits")
    return np.array([(v >> j) & 1 for j in range(length)], dtype=np.uint8)


@dataclass(frozen=True)
class BitMatrix:
    """Dense GF(2) matrix, one packed int per row."""

    nrows: int
    ncols: int
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise DimensionMismatch(f"{len(self.rows)} rows given, expected {self.nrows}")
        for r in self.rows:
            if r < 0 or r.bit_length() > self.ncols:
                raise DimensionMismatch(f"row does not fit in {self.ncols} columns")

    @classmethod
    def from_array(cls, arr) -> "BitMatrix":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise DimensionMismatch("expected a 2-d array")
        if a.size and not np.isin(a, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        m, n = a.shape
        if m == 0 or n == 0:
            return cls(m, n, tuple(0 for _ in range(m)))
        packed = np.packbits(a.astype(np.uint8), axis=1, bitorder="little")
        rows = tuple(int.from_bytes(packed[i].tobytes(), "little") for i in range(m))
        return cls(m, n, rows)

    @classmethod
    def from_rows(cls, rows: Sequence[int], ncols: int) -> "BitMatrix":
        return cls(len(rows), ncols, tuple(int(r) for r in rows))

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            out[i] = int_to_bits(r, self.ncols)
        return out

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array().T)


def _rows_of(M) -> tuple[list[int], int]:
    if isinstance(M, BitMatrix):
        return list(M.rows), M.ncols
    a = np.asarray(M)
    bm = BitMatrix.from_array(a)
    return list(bm.rows), bm.ncols


def rank(M) -> int:
    """Rank over GF(2)."""
    rows, _ = _rows_of(M)
    return _xor_basis_rank(rows)


def _xor_basis_rank(rows: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            h = r.bit_length() - 1
            if h in basis:
                r ^= basis[h]
            else:
                basis[h] = r
                break
    return len(basis)


def rref(rows: Sequence[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form of packed rows, pivoting on columns < ncols.

    Bits at positions >= ncols (an augmented column, say) are carried along
    but never pivoted on. Returns the nonzero reduced rows, in pivot order,
    and their pivot columns.
    """
    work = [int(r) for r in rows]
    pivots: list[int] = []
    top = 0
    for c in range(ncols):
        bit = 1 << c
        sel = next((i for i in range(top, len(work)) if work[i] & bit), None)
        if sel is None:
            continue
        work[top], work[sel] = work[sel], work[top]
        prow = work[top]
        for i in range(len(work)):
            if i != top and work[i] & bit:
                work[i] ^= prow
        pivots.append(c)
        top += 1
        if top == len(work):
            break
    return work[:top] + [r for r in work[top:] if r], pivots


def nullspace(M) -> list[int]:
    """Basis of {p : M p = 0}, one packed vector per free column."""
    rows, ncols = _rows_of(M)
    red, pivots = rref(rows, ncols)
    return _null_basis(red, pivots, ncols)


def _null_basis(red: list[int], pivots: list[int], ncols: int) -> list[int]:
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = 1 << f
        fb = 1 << f
        for r, pc in zip(red, pivots):
            if r & fb:
                v |= 1 << pc
        basis.append(v)
    return basis


def solve_affine_all(M, b, cap: int) -> list[int]:
    """Every solution ``p`` of ``M p = b`` over GF(2).

    ``b`` is a packed int (bit ``i`` is the right-hand side of row ``i``) or a
    0/1 sequence. Solutions are a particular solution plus the span of the
    nullspace basis, emitted in Gray-code order over the free variables.
    An inconsistent system returns ``[]``. Raises `SolutionCountExceeded`
    instead of truncating when there are more than ``cap`` solutions.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    rows, ncols = _rows_of(M)
    m = len(rows)
    if not isinstance(b, (int, np.integer)):
        b_bits = list(b)
        if len(b_bits) != m:
            raise DimensionMismatch(f"rhs has length {len(b_bits)}, matrix has {m} rows")
        b = bits_to_int(b_bits)
    b = int(b)
    if b < 0 or b.bit_length() > m:
        raise DimensionMismatch(f"rhs does not fit in {m} bits")

    aug_bit = 1 << ncols
    aug = [r | (aug_bit if (b >> i) & 1 else 0) for i, r in enumerate(rows)]
    red, pivots = rref(aug, ncols)
    if any(r == aug_bit for r in red[len(pivots):]):
        return []
    red = red[: len(pivots)]

    particular = 0
    for r, pc in zip(red, pivots):
        if r & aug_bit:
            particular |= 1 << pc
    basis = _null_basis([r & (aug_bit - 1) for r in red], pivots, ncols)

    count = 1 << len(basis)
    if count > cap:
        raise SolutionCountExceeded(count, cap)

    out = [particular]
    cur = particular
    for i in range(1, count):
        cur ^= basis[(i & -i).bit_length() - 1]
        out.append(cur)
    return out


def mat_vec(M, v: int) -> int:
    rows, ncols = _rows_of(M)
    if v < 0 or v.bit_length() > ncols:
        raise DimensionMismatch(f"vector does not fit in {ncols} columns")
    out = 0
    for i, r in enumerate(rows):
        if (r & v).bit_count() & 1:
            out |= 1 << i
    return out


def linearly_independent(vectors: Sequence[int], length: int | None = None) -> bool:
    """True iff the packed vectors are linearly independent over GF(2)."""
    vecs = [int(v) for v in vectors]
    if length is not None and any(v.bit_length() > length for v in vecs):
        raise DimensionMismatch(f"vector does not fit in {length} bits")
    return _xor_basis_rank(vecs) == len(vecs)
