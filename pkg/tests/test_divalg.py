import random

import pytest

from ncrit import linalg
from ncrit.divalg import (
    DivAlgebra,
    basis_C,
    c_basis_matrix,
    cir,
    circulant_of,
    combine_C,
    d_inverse,
    d_pow,
    express_element_in_C,
    express_in_C,
    from_matrix,
    is_sigma_chain,
    matrix_rep,
    sigma_chain,
    sigma_fixes_level,
)
from ncrit.exceptions import NotInSpanError, ShapeError


def test_x_to_the_index_is_z():
    for ell in (2, 4):
        algebra = DivAlgebra(ell, 1)
        assert d_pow(algebra.x(), ell) == algebra.scalar(algebra.field.z())
        assert algebra.x(ell + 1) == algebra.scalar(algebra.field.z()) * algebra.x()


def test_x_twists_scalars():
    algebra = DivAlgebra(4, 1)
    b = algebra.field.omega() + algebra.field.z()
    left = algebra.x() * algebra.scalar(b)
    right = algebra.scalar(algebra.sigma_of(b)) * algebra.x()
    assert left == right
    assert left != algebra.scalar(b) * algebra.x()


def test_matrix_rep_is_multiplicative():
    algebra = DivAlgebra(4, 1)
    rng = random.Random(5)
    for _ in range(3):
        u = algebra.random_element(rng)
        v = algebra.random_element(rng)
        assert linalg.matrices_equal(matrix_rep(u * v), matrix_rep(u) @ matrix_rep(v))
        assert linalg.matrices_equal(matrix_rep(u + v), matrix_rep(u) + matrix_rep(v))


def test_hitting_point_shape_is_b_times_x():
    algebra = DivAlgebra(4, 1)
    b = algebra.field.omega() + 2
    expected = matrix_rep(algebra.scalar(b) * algebra.x())
    assert linalg.matrices_equal(circulant_of(algebra, sigma_chain(algebra, b)), expected)
    assert is_sigma_chain(algebra, sigma_chain(algebra, b))


def test_cir_layout():
    C = cir([1, 2, 3])
    assert C[0, 1] == 1 and C[1, 2] == 2 and C[2, 0] == 3
    assert C[0, 0] == 0
    with pytest.raises(ShapeError):
        cir([1, 2], ell=4)


def test_from_matrix_reads_row_zero():
    algebra = DivAlgebra(4, 1)
    u = algebra.omega() + algebra.x(2)
    assert from_matrix(algebra, matrix_rep(u)) == u
    with pytest.raises(NotInSpanError):
        from_matrix(algebra, linalg.k_identity(4, 4) + linalg.to_field(cir([1, 0, 0, 0]), algebra.field))


def test_inverse_of_one_plus_x():
    algebra = DivAlgebra(4, 1)
    u = algebra.one() + algebra.x()
    inv = d_inverse(u)
    assert u * inv == algebra.one()
    # (1 + x)(1 - x + x^2 - x^3) = 1 - z
    numerator = algebra.one() - algebra.x() + algebra.x(2) - algebra.x(3)
    assert inv * (1 - algebra.field.z()) == numerator
    with pytest.raises(ZeroDivisionError):
        d_inverse(algebra.zero())


def test_express_in_c_round_trip():
    algebra = DivAlgebra(4, 1)
    rng = random.Random(2)
    u = algebra.random_element(rng)
    y = express_element_in_C(u)
    assert linalg.matrices_equal(combine_C(algebra, y), matrix_rep(u))


def test_c_basis_spans_a_deficient_subspace():
    algebra = DivAlgebra(4, 1)
    assert algebra.span_rank() == 8
    assert linalg.rank(c_basis_matrix(algebra)) == 8
    assert linalg.matrices_equal(basis_C(algebra, 1, 1), linalg.k_identity(4, 4))


def test_matrix_outside_c_span():
    algebra = DivAlgebra(2, 1)
    e12 = linalg.rational_matrix([[0, 1], [0, 0]])
    with pytest.raises(NotInSpanError):
        express_in_C(algebra, e12)


def test_sigma_fixes_level():
    algebra = DivAlgebra(16, 2)
    assert sigma_fixes_level(algebra, 2, 0)
    assert sigma_fixes_level(algebra, 0, 3)
    assert not sigma_fixes_level(algebra, 0, 0)


def test_index_must_be_power_of_two():
    with pytest.raises(ValueError):
        DivAlgebra(6, 1)
