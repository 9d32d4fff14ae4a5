from fractions import Fraction

import numpy as np
import pytest

from quadricgon.exactlinalg import (
    Field,
    batched_pencil_basis,
    inverse_mod,
    kernel_basis,
    rank,
    rref,
    solve,
)


def test_coercion_of_fractions_and_strings():
    F7 = Field(7)
    assert F7("1/2") == 4
    assert F7(Fraction(3, 2)) == 5
    assert F7(-1) == 6
    assert Field(None)("3/4") == Fraction(3, 4)


def test_inverse_of_zero_raises(field):
    with pytest.raises(ZeroDivisionError):
        field.inv(0)


@pytest.mark.parametrize("p", [65537, None, 2**31 - 1])
def test_rank_of_singular_matrix(p):
    F = Field(p)
    assert rank([[1, 2], [2, 4]], F) == 1
    assert rank([[1, 2, 3], [0, 1, 4], [5, 6, 0]], F) == 3
    assert rank(F.zeros((0, 3)), F) == 0


def test_rref_pivots(field):
    R, pivots = rref([[0, 2, 4], [0, 1, 3]], field)
    assert pivots == [1, 2]
    assert list(R[0]) == [0, 1, 0]
    assert list(R[1]) == [0, 0, 1]


@pytest.mark.parametrize("p", [65537, None])
def test_kernel_dimension_and_annihilation(p, rng):
    F = Field(p)
    m = F.matrix([[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, 1, 1]])
    basis = kernel_basis(m, F)
    assert len(basis) == 4 - rank(m, F) == 2
    for v in basis:
        assert not np.any(F.dot(m, v) != 0)


def test_solve_consistent_and_inconsistent(field):
    m = [[1, 1], [1, 2]]
    x = solve(m, [3, 5], field)
    assert list(x) == [1, 2]
    assert solve([[1, 1], [1, 1]], [1, 2], field) is None


def test_inverse_mod_vectorised():
    out = inverse_mod(np.array([1, 2, 3], dtype=np.int64), 7)
    assert list(out) == [1, 4, 5]


def test_batched_pencil_basis_matches_kernel(field, rng):
    p = field.p
    blocks = rng.integers(0, p, size=(20, 4, 6)).astype(np.int64)
    blocks[3, :, 0] = 0
    ok, basis = batched_pencil_basis(blocks, p)
    assert not ok[3]
    assert ok.sum() >= 15
    for n in np.flatnonzero(ok):
        assert basis[n].shape == (2, 6)
        assert not np.any((blocks[n] @ basis[n].T) % p)
