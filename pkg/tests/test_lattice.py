from fractions import Fraction

import pytest

from flagstone.curve import Basis, SearchWindow, build_basis
from flagstone.driver import DriverConfig, sample_window
from flagstone.errors import DegenerateBasis, InvalidParams
from flagstone.lattice import (
    ReducedLattice,
    gram_schmidt,
    is_lll_reduced,
    is_unimodular,
    lattices_equal,
    lll_reduce,
)
from flagstone.linalg import columns, det, identity, mat, matmul, norm2, vec
from flagstone.rng import trial_rng
from tests.conftest import REFERENCE_M


def basis(*cols: tuple) -> Basis:
    return Basis(tuple(vec(c) for c in cols))  # pyright: ignore[reportArgumentType]


def test_gram_schmidt_identity() -> None:
    gso = gram_schmidt(identity())
    assert gso.bstar == identity()
    assert gso.norms == (1, 1, 1)
    assert all(x == 0 for row in gso.mu for x in row)


def test_gram_schmidt_triangular() -> None:
    gso = gram_schmidt([(1, 0, 0), (1, 1, 0), (1, 1, 1)])
    assert gso.bstar == identity()
    assert gso.mu[1][0] == 1
    assert gso.mu[2][0] == 1
    assert gso.mu[2][1] == 1


def test_gram_schmidt_dependent() -> None:
    with pytest.raises(DegenerateBasis):
        gram_schmidt([(1, 2, 3), (2, 4, 6), (0, 0, 1)])


def test_lll_identity() -> None:
    red = lll_reduce(basis((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert red.M == identity()
    assert red.H == identity()


def test_lll_diagonal() -> None:
    red = lll_reduce(basis((5, 0, 0), (0, Fraction(1, 7), 0), (0, 0, 3)))
    assert is_unimodular(red.M)
    assert is_lll_reduced(red.H)
    assert abs(det(red.H)) == Fraction(15, 7)
    # shortest first
    assert [norm2(c) for c in red.reduced_columns] == [Fraction(1, 49), 9, 25]


def test_lll_delta_validation() -> None:
    with pytest.raises(InvalidParams):
        lll_reduce(basis((1, 0, 0), (0, 1, 0), (0, 0, 1)), Fraction(1, 4))
    with pytest.raises(InvalidParams):
        lll_reduce(basis((1, 0, 0), (0, 1, 0), (0, 0, 1)), Fraction(1))


def test_lll_degenerate() -> None:
    with pytest.raises(DegenerateBasis):
        lll_reduce(basis((1, 2, 3), (2, 4, 6), (0, 0, 1)))


def test_worked_example_reduction(worked_reduction: ReducedLattice) -> None:
    red = worked_reduction
    assert is_unimodular(red.M)
    assert is_lll_reduced(red.H)
    assert matmul(red.F.matrix, red.M) == red.H

    # |b1|² <= 2^((n-1)/2)·|det|^(2/n) for δ = 3/4
    first = red.reduced_columns[0]
    assert float(norm2(first)) <= 2 * float(abs(red.F.det())) ** (2 / 3)

    # the first two columns of M, up to sign
    m_cols = columns(red.M)
    assert {tuple(abs(x) for x in m_cols[i]) for i in (0, 1)} == {(15, 47, 48), (74, 230, 235)}


def test_reference_reduction(worked_example: SearchWindow) -> None:
    assert is_unimodular(REFERENCE_M)
    F = build_basis(worked_example).matrix
    assert lattices_equal(F, matmul(F, REFERENCE_M))


def test_lattices_equal() -> None:
    assert lattices_equal(identity(), mat([(1, 1, 0), (0, 1, 0), (0, 0, 1)]))
    assert not lattices_equal(identity(), mat([(2, 0, 0), (0, 1, 0), (0, 0, 1)]))
    half = Fraction(1, 2)
    assert lattices_equal(mat([(half, 0, 0), (0, 3, 0), (0, 0, 1)]), mat([(half, 0, 0), (3, 3, 0), (0, 0, -1)]))


def test_lll_deterministic(worked_example: SearchWindow) -> None:
    F = build_basis(worked_example)
    assert lll_reduce(F).M == lll_reduce(F).M


def test_gso_of_result(worked_reduction: ReducedLattice) -> None:
    assert worked_reduction.gso == gram_schmidt(worked_reduction.reduced_columns)


def check_random_windows(n: int) -> None:
    cfg = DriverConfig()
    for trial in range(n):
        F = build_basis(sample_window(trial_rng(1234, trial), cfg))
        red = lll_reduce(F)
        assert is_unimodular(red.M), trial
        assert lattices_equal(F.matrix, red.H), trial
        assert is_lll_reduced(red.H), trial


def test_random_windows() -> None:
    check_random_windows(100)


@pytest.mark.slow
def test_random_windows_acceptance() -> None:
    check_random_windows(1000)
