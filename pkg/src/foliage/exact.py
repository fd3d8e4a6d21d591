"""Sparse matrices over the rationals with fraction-free elimination.

Entries are kept as ``int`` or ``fractions.Fraction``; nothing is ever
converted to floating point.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Mapping


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions, and decimal/rational strings to ``Fraction``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


class SparseMatrix:
    """Dictionary-of-keys matrix with exact rational entries."""

    __slots__ = ("shape", "_rows")

    def __init__(self, shape: tuple[int, int], entries: Mapping[tuple[int, int], object] | None = None):
        n_rows, n_cols = shape
        if n_rows < 0 or n_cols < 0:
            raise ValueError("negative shape")
        self.shape = (int(n_rows), int(n_cols))
        self._rows: dict[int, dict[int, Fraction]] = {}
        for (i, j), v in (entries or {}).items():
            self[i, j] = v

    def __setitem__(self, key, value):
        i, j = key
        if not (0 <= i < self.shape[0] and 0 <= j < self.shape[1]):
            raise IndexError(f"entry {key} outside shape {self.shape}")
        v = as_rational(value)
        row = self._rows.setdefault(i, {})
        if v == 0:
            row.pop(j, None)
            if not row:
                del self._rows[i]
        else:
            row[j] = v

    def __getitem__(self, key) -> Fraction:
        i, j = key
        return self._rows.get(i, {}).get(j, Fraction(0))

    def add(self, i: int, j: int, value) -> None:
        self[i, j] = self[i, j] + as_rational(value)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def items(self) -> Iterable[tuple[tuple[int, int], Fraction]]:
        for i in sorted(self._rows):
            row = self._rows[i]
            for j in sorted(row):
                yield (i, j), row[j]

    def row(self, i: int) -> dict[int, Fraction]:
        return dict(self._rows.get(i, {}))

    def is_zero(self) -> bool:
        return not self._rows

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot compose {self.shape} with {other.shape}")
        out = SparseMatrix((self.shape[0], other.shape[1]))
        for i, row in self._rows.items():
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                for j, b in other._rows.get(k, {}).items():
                    acc[j] = acc.get(j, 0) + a * b
            for j, v in acc.items():
                if v:
                    out[i, j] = v
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def to_dense(self) -> list[list[Fraction]]:
        dense = [[Fraction(0)] * self.shape[1] for _ in range(self.shape[0])]
        for (i, j), v in self.items():
            dense[i][j] = v
        return dense

    @classmethod
    def from_dense(cls, rows: list[list[object]]) -> "SparseMatrix":
        n_cols = len(rows[0]) if rows else 0
        m = cls((len(rows), n_cols))
        for i, r in enumerate(rows):
            if len(r) != n_cols:
                raise ValueError("ragged matrix")
            for j, v in enumerate(r):
                m[i, j] = v
        return m

    def rank(self) -> int:
        return exact_rank(self)

    def __repr__(self) -> str:
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def _integer_row(row: Mapping[int, Fraction]) -> dict[int, int]:
    scale = reduce(lcm, (v.denominator for v in row.values()), 1)
    ints = {j: int(v * scale) for j, v in row.items()}
    g = reduce(gcd, ints.values(), 0)
    return {j: v // g for j, v in ints.items()} if g > 1 else ints


def exact_rank(matrix: SparseMatrix) -> int:
    """Rank by fraction-free row elimination.

    Each row is scaled to primitive integers, and eliminations use
    ``r <- p_piv * r - r_piv * p`` followed by content removal, so entries stay
    integral and small.
    """
    rows = [_integer_row(matrix.row(i)) for i in range(matrix.shape[0])]
    rows = [r for r in rows if r]
    rank = 0
    while rows:
        # sparsest row with the smallest leading column as pivot keeps fill-in low
        pivot_idx = min(range(len(rows)), key=lambda k: (min(rows[k]), len(rows[k])))
        pivot = rows.pop(pivot_idx)
        col = min(pivot)
        p = pivot[col]
        rank += 1
        reduced = []
        for r in rows:
            a = r.get(col)
            if a is None:
                reduced.append(r)
                continue
            new: dict[int, int] = {}
            for j in set(r) | set(pivot):
                v = p * r.get(j, 0) - a * pivot.get(j, 0)
                if v:
                    new[j] = v
            if new:
                g = reduce(gcd, new.values(), 0)
                if g > 1:
                    new = {j: v // g for j, v in new.items()}
                reduced.append(new)
        rows = reduced
    return rank


def exact_determinant(rows: list[list[object]]) -> Fraction:
    """Determinant by Bareiss elimination (dense, exact)."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    fr = [[as_rational(v) for v in r] for r in rows]
    scale = reduce(lcm, (v.denominator for r in fr for v in r), 1)
    a = [[int(v * scale) for v in r] for r in fr]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], scale**n)
