"""Exact rational vector and matrix helpers.

Matrices are tuples of rows. All arithmetic is over `Fraction` (or `int`), so
results are exact; nothing here ever touches floating point.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from typing import Union

from flagstone.errors import DegenerateBasis

Scalar = Union[int, Fraction]
Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]
IntMatrix = tuple[tuple[int, ...], ...]


def vec(values: Sequence[Scalar]) -> Vector:
    return tuple(Fraction(v) for v in values)


def mat(rows: Sequence[Sequence[Scalar]]) -> Matrix:
    return tuple(vec(r) for r in rows)


def identity(n: int = 3) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Fraction:
    assert len(u) == len(v), f"Cannot dot vectors of length {len(u)} and {len(v)}"
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def norm2(v: Sequence[Scalar]) -> Fraction:
    return dot(v, v)


def sub(u: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
    return tuple(Fraction(a) - b for a, b in zip(u, v))


def transpose(m: Sequence[Sequence[Scalar]]) -> tuple[tuple[Scalar, ...], ...]:
    return tuple(zip(*m))


def columns(m: Sequence[Sequence[Scalar]]) -> Matrix:
    return tuple(vec(c) for c in transpose(m))


def from_columns(cols: Sequence[Sequence[Scalar]]) -> Matrix:
    return columns(cols)


def matmul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def matvec(a: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> Vector:
    return tuple(dot(row, v) for row in a)


def int_matvec(a: IntMatrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def det(m: Sequence[Sequence[Scalar]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    rows = [list(vec(r)) for r in m]
    n = len(rows)
    result = Fraction(1)
    for i in range(n):
        pivot = next((r for r in range(i, n) if rows[r][i] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != i:
            rows[i], rows[pivot] = rows[pivot], rows[i]
            result = -result
        result *= rows[i][i]
        for r in range(i + 1, n):
            if factor := rows[r][i] / rows[i][i]:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[i])]
    return result


def inverse(m: Sequence[Sequence[Scalar]]) -> Matrix:
    """Gauss-Jordan inverse.

    Raises:
        DegenerateBasis: if the matrix is singular.
    """
    n = len(m)
    aug = [list(vec(r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for i in range(n):
        pivot = next((r for r in range(i, n) if aug[r][i] != 0), None)
        if pivot is None:
            raise DegenerateBasis("matrix is singular")
        aug[i], aug[pivot] = aug[pivot], aug[i]
        p = aug[i][i]
        aug[i] = [a / p for a in aug[i]]
        for r in range(n):
            if r != i and (factor := aug[r][i]):
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[i])]
    return tuple(tuple(row[n:]) for row in aug)


def is_integral(m: Sequence[Sequence[Scalar]]) -> bool:
    return all(Fraction(x).denominator == 1 for row in m for x in row)
