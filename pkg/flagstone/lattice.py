"""Exact LLL reduction of the 3×3 window basis.

The basis vectors are the *columns* of F. Reduction tracks the integer
coefficient vectors alongside, so the result is a unimodular M with H = F·M.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from flagstone.curve import Basis
from flagstone.errors import DegenerateBasis, InvalidParams
from flagstone.linalg import (
    IntMatrix,
    Matrix,
    Scalar,
    Vector,
    columns,
    det,
    dot,
    from_columns,
    identity,
    inverse,
    is_integral,
    matmul,
    norm2,
    sub,
    vec,
)

DEFAULT_DELTA = Fraction(3, 4)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class GramSchmidt:
    bstar: tuple[Vector, ...]
    norms: tuple[Fraction, ...]
    # mu[i][j] for j < i, zeros elsewhere
    mu: tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class ReducedLattice:
    F: Basis
    M: IntMatrix
    H: Matrix
    gso: GramSchmidt

    @property
    def reduced_columns(self) -> Matrix:
        return columns(self.H)


def gram_schmidt(basis: Sequence[Sequence[Scalar]]) -> GramSchmidt:
    """Gram–Schmidt over the given vectors (each element of `basis` is one vector).

    Raises:
        DegenerateBasis: if the vectors are linearly dependent.
    """
    n = len(basis)
    bstar: list[Vector] = []
    norms: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i, b in enumerate(basis):
        v = vec(b)
        for j in range(i):
            mu[i][j] = dot(b, bstar[j]) / norms[j]
            v = sub(v, tuple(mu[i][j] * x for x in bstar[j]))
        if (n2 := norm2(v)) == 0:
            raise DegenerateBasis(f"vector {i} is dependent on the previous ones")
        bstar.append(v)
        norms.append(n2)
    return GramSchmidt(tuple(bstar), tuple(norms), tuple(tuple(r) for r in mu))


def _reduce(cols: list[Vector], coeffs: list[list[int]], delta: Fraction) -> GramSchmidt:
    n = len(cols)
    gso = gram_schmidt(cols)
    mu = [list(r) for r in gso.mu]
    norms = list(gso.norms)

    def size_reduce(k: int, j: int) -> None:
        if abs(mu[k][j]) <= HALF:
            return
        q = round(mu[k][j])
        cols[k] = tuple(a - q * b for a, b in zip(cols[k], cols[j]))
        coeffs[k] = [a - q * b for a, b in zip(coeffs[k], coeffs[j])]
        for i in range(j):
            mu[k][i] -= q * mu[j][i]
        mu[k][j] -= q

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            for j in range(k - 2, -1, -1):
                size_reduce(k, j)
            k += 1
        else:
            cols[k], cols[k - 1] = cols[k - 1], cols[k]
            coeffs[k], coeffs[k - 1] = coeffs[k - 1], coeffs[k]
            # 3×3: recomputing the whole orthogonalisation is cheaper to get right than the swap update
            gso = gram_schmidt(cols)
            mu = [list(r) for r in gso.mu]
            norms = list(gso.norms)
            k = max(k - 1, 1)

    return gram_schmidt(cols)


def lll_reduce(F: Basis, delta: Fraction = DEFAULT_DELTA) -> ReducedLattice:
    """δ-LLL-reduce the columns of F.

    Deterministic: the same basis and δ always give the same M.

    Raises:
        InvalidParams: if δ is outside (1/4, 1).
        DegenerateBasis: if F is singular.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise InvalidParams(f"delta must be in (1/4, 1), got {delta}")

    cols = list(F.columns)
    n = len(cols)
    coeffs = [list(row) for row in identity(n)]
    gso = _reduce(cols, coeffs, delta)

    M = tuple(tuple(row) for row in zip(*coeffs))
    H = from_columns(cols)
    assert matmul(F.matrix, M) == H, "reduced basis drifted from F·M"
    return ReducedLattice(F=F, M=M, H=H, gso=gso)


def is_unimodular(M: Sequence[Sequence[Scalar]]) -> bool:
    return is_integral(M) and abs(det(M)) == 1


def is_lll_reduced(H: Sequence[Sequence[Scalar]], delta: Fraction = DEFAULT_DELTA) -> bool:
    """Size-reduction and Lovász conditions on the columns of H, checked exactly."""
    gso = gram_schmidt(columns(H))
    n = len(gso.norms)
    size_ok = all(abs(gso.mu[i][j]) <= HALF for i in range(n) for j in range(i))
    lovasz_ok = all(
        delta * gso.norms[i] <= gso.norms[i + 1] + gso.mu[i + 1][i] ** 2 * gso.norms[i] for i in range(n - 1)
    )
    return size_ok and lovasz_ok


def lattices_equal(F: Sequence[Sequence[Scalar]], H: Sequence[Sequence[Scalar]]) -> bool:
    """True iff the columns of F and H generate the same lattice.

    Raises:
        DegenerateBasis: if either matrix is singular.
    """
    return is_integral(matmul(inverse(F), H)) and is_integral(matmul(inverse(H), F))
