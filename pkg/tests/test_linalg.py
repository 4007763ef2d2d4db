import random
from fractions import Fraction

import pytest

from ncrit import linalg
from ncrit.exceptions import FieldMismatchError, ShapeError, SingularMatrixError
from ncrit.fields import CyclotomicFunctionField, KElem


def _random_rational(rng, n):
    return linalg.rational_matrix([[Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)] for _ in range(n)])


def test_det_matches_leibniz():
    rng = random.Random(7)
    for n in (1, 2, 3, 4):
        for _ in range(5):
            A = _random_rational(rng, n)
            assert linalg.det(A) == linalg.brute_force_det(A)


def test_det_small():
    assert linalg.det(linalg.rational_matrix([[1, 2], [3, 4]])) == -2


def test_monomial_det_has_sign():
    shift = linalg.rational_matrix([[0, 2, 0], [0, 0, 3], [5, 0, 0]])
    assert linalg.det(shift) == 30
    swap = linalg.rational_matrix([[0, 1], [1, 0]])
    assert linalg.det(swap) == -1
    assert linalg.det(swap) == linalg.brute_force_det(swap)


def test_inverse_and_solve():
    A = linalg.rational_matrix([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    assert linalg.matrices_equal(linalg.mat_mul(linalg.inverse(A), A), linalg.identity(3))
    B = linalg.rational_matrix([[1], [2], [3]])
    X = linalg.solve(A, B)
    assert linalg.matrices_equal(linalg.mat_mul(A, X), B)


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrixError):
        linalg.inverse(linalg.rational_matrix([[1, 2], [2, 4]]))


def test_rank():
    assert linalg.rank(linalg.rational_matrix([[1, 2], [2, 4]])) == 1
    assert linalg.rank(linalg.rational_matrix([[1, 0, 1], [0, 1, 1]])) == 2
    assert linalg.rank(linalg.zeros(2, 3)) == 0


def test_kron_and_block():
    A = linalg.rational_matrix([[1, 2], [3, 4]])
    B = linalg.identity(2)
    K = linalg.kron(A, B)
    assert K.shape == (4, 4)
    assert linalg.matrices_equal(linalg.block(K, 1, 2, 2), linalg.identity(2) * 2)
    assert linalg.matrices_equal(linalg.block(K, 2, 1, 2), linalg.identity(2) * 3)
    with pytest.raises(ShapeError):
        linalg.block(K, 3, 1, 2)
    with pytest.raises(ShapeError):
        linalg.block(K, 1, 1, 3)


def test_block_diag_and_permutation():
    A = linalg.rational_matrix([[1]])
    B = linalg.rational_matrix([[2, 0], [0, 3]])
    D = linalg.block_diag(A, B)
    assert linalg.det(D) == 6
    P = linalg.permutation_matrix([2, 0, 1])
    e0 = linalg.rational_matrix([[1], [0], [0]])
    assert linalg.matrices_equal(linalg.mat_mul(P, e0), linalg.rational_matrix([[0], [0], [1]]))


def test_is_invertible_over_k():
    K = CyclotomicFunctionField(4)
    z = K.z()
    assert linalg.is_invertible(linalg.matrix([[z, 1], [1, z]], K))
    assert not linalg.is_invertible(linalg.matrix([[z, z], [1, 1]], K))
    assert linalg.is_invertible(linalg.k_identity(3, 4))


def test_mixed_fields_are_rejected():
    A = linalg.rational_matrix([[1]])
    B = linalg.matrix([[KElem.z(4)]], CyclotomicFunctionField(4))
    with pytest.raises(FieldMismatchError):
        linalg.mat_mul(A, B)


def test_matrix_shape_checks():
    with pytest.raises(ShapeError):
        linalg.matrix([[1, 2], [3]])
    with pytest.raises(ShapeError):
        linalg.mat_mul(linalg.zeros(2, 3), linalg.zeros(2, 3))
