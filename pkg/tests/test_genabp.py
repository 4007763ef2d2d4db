import random
from fractions import Fraction

import numpy as np
import pytest

from ncrit import linalg
from ncrit.divalg import DivAlgebra, matrix_rep
from ncrit.exceptions import CertificationError, InfeasibleParametersError, ShapeError
from ncrit.genabp import (
    IOTA_LEFT,
    IOTA_RIGHT,
    GenABP,
    GenLinForm,
    ShiftedSubstitution,
    SparsePoly,
    certify_family,
    cyclic_permutation,
    embed,
    encode_exponent,
    encoding_base,
    evaluate_substitution,
    q0_matrix,
    roabp_hitting_set,
    shifted_cyclic_eval,
    strong_hitting_set_genabp,
    to_roabp,
    twisted_word_family,
    y_values,
)
from ncrit.utils import DeskParams


def _blocks_match(full, blocks, ell):
    d = len(blocks)
    for i in range(d):
        for j in range(d):
            part = full[i * ell : (i + 1) * ell, j * ell : (j + 1) * ell]
            if i == j:
                if not linalg.matrices_equal(part, blocks[i].expand()):
                    return False
            elif any(part.flat):
                return False
    return True


def test_q0_layout():
    q0 = q0_matrix(2, 3)
    ones = [list(row).index(1) for row in q0]
    assert ones == [0, 2, 4, 1, 3, 5]


def test_q0_conjugates_left_embedding_to_right():
    a = linalg.rational_matrix([[1, 2], [3, 4]])
    q0 = q0_matrix(2, 3)
    conjugated = q0 @ embed(a, 3, IOTA_LEFT) @ q0.T
    assert linalg.matrices_equal(conjugated, embed(a, 3, IOTA_RIGHT))
    assert linalg.matrices_equal(embed(a, 3, IOTA_RIGHT), np.kron(a, linalg.identity(3)))
    with pytest.raises(ValueError):
        embed(a, 2, "a*I")


def test_linear_form_evaluates_sandwich():
    a = linalg.rational_matrix([[1, 1], [0, 1]])
    b = linalg.rational_matrix([[2, 0], [0, 1]])
    X = linalg.rational_matrix([[0, 1], [1, 0]])
    form = GenLinForm(((a, 1, b),), 2)
    assert linalg.matrices_equal(form.evaluate([X]), a @ X @ b)
    with pytest.raises(ShapeError):
        GenLinForm(((a, 1, linalg.identity(3)),), 2)


def test_scalar_coefficients_ignore_the_inclusion():
    coeffs = [linalg.rational_matrix([[v]]) for v in (2, 3, 5)]
    B = GenABP.from_word(coeffs, [1, 2])
    X1 = linalg.rational_matrix([[1, 2], [0, 1]])
    X2 = linalg.rational_matrix([[0, 1], [1, 1]])
    expected = (X1 @ X2) * 30
    assert linalg.matrices_equal(B.evaluate([X1, X2], IOTA_RIGHT), expected)
    assert linalg.matrices_equal(B.evaluate([X1, X2], IOTA_LEFT), expected)


def test_sum_of_words():
    eye = linalg.identity(2)
    A = linalg.rational_matrix([[1, 2], [0, 1]])
    B = GenABP.sum_of_words([([eye, eye], [1]), ([A, eye], [1])])
    assert B.width == 2 and B.degree == 1
    X = linalg.rational_matrix([[0, 1], [1, 0]])
    assert linalg.matrices_equal(B.evaluate([X]), X + A @ X)
    with pytest.raises(ValueError):
        GenABP.sum_of_words([([eye, eye], [1]), ([eye], [])])


def test_word_coefficients():
    coeffs = [linalg.rational_matrix([[2]]), linalg.rational_matrix([[3]])]
    words = GenABP.from_word(coeffs, [1]).word_coefficients()
    assert list(words) == [((1, 1, 1),)]
    assert words[((1, 1, 1),)][0, 0] == 6

    eye = linalg.identity(2)
    words = GenABP.from_word([eye, eye], [1]).word_coefficients()
    assert len(words) == 4
    assert linalg.matrices_equal(words[((1, 2, 1),)], linalg.rational_matrix([[0, 1], [0, 0]]))


def test_sparse_poly_arithmetic():
    y1, y2 = SparsePoly.variable("a"), SparsePoly.variable("b")
    assert (y1 + y2) * (y1 - y2) == y1 * y1 - y2 * y2
    assert (y1 * 3 + 1).evaluate({"a": Fraction(2)}) == 7
    assert not (y1 - y1)
    renamed = (y1 * y1).substitute(lambda var: ("c", 3))
    assert renamed.variables() == {"c"}
    assert renamed.evaluate({"c": 2}) == 64


def test_cyclic_permutation():
    assert cyclic_permutation(1, 3) == [1, 2, 3]
    assert cyclic_permutation(2, 3) == [2, 3, 1]
    assert cyclic_permutation(3, 3) == [3, 1, 2]


def test_shifted_substitution_is_block_diagonal_after_d_layers():
    algebra = DivAlgebra(2, 1)
    K = algebra.field
    eye = linalg.identity(2, K)
    A = linalg.matrix([[1, 2], [0, 1]], K)
    B = GenABP.from_word([eye, A, eye, A], [1, 2, 1])
    subst = ShiftedSubstitution(algebra, 2, 3)
    full = evaluate_substitution(B, subst)
    blocks = shifted_cyclic_eval(B, algebra, n=2)
    assert [blk.order for blk in blocks] == [(1, 2, 3), (2, 3, 1), (3, 1, 2)]
    assert _blocks_match(full, blocks, 2)


def test_shifted_substitution_with_twisted_coefficients():
    algebra = DivAlgebra(4, 1)
    x = matrix_rep(algebra.x())
    w = matrix_rep(algebra.omega())
    B = GenABP.from_word([x, w, x], [1, 1])
    full = evaluate_substitution(B, ShiftedSubstitution(algebra, 1, 2))
    assert _blocks_match(full, shifted_cyclic_eval(B, algebra, n=1), 4)


def test_encoding():
    assert encoding_base(4, 1, 1) == 5
    assert encode_exponent(1, 1, 1, 5) == 31
    assert encoding_base(2, 3, 1) == 4
    base = encoding_base(4, 2, 2)
    exponents = {encode_exponent(i, j, k, base) for i in range(1, 5) for j in range(1, 5) for k in range(1, 3)}
    assert len(exponents) == 32


def test_roabp_encoding_agrees_with_block():
    algebra = DivAlgebra(2, 1)
    K = algebra.field
    A = linalg.matrix([[1, 1], [0, 1]], K)
    B = GenABP.from_word([A, linalg.identity(2, K), A], [1, 2])
    (first, second) = shifted_cyclic_eval(B, algebra, n=2)
    roabp = to_roabp(second, algebra.ell)
    assert roabp.order == (2, 1)
    assignment = (Fraction(2), Fraction(-1))
    values = y_values(assignment, algebra.ell, 2, 2)
    assert linalg.matrices_equal(roabp.evaluate(assignment), second.evaluate(values))
    assert linalg.matrices_equal(to_roabp(first, algebra.ell).evaluate(assignment), first.evaluate(values))


def test_roabp_grid_backend():
    points, record = roabp_hitting_set(2, 1, 2, DeskParams())
    assert record["backend"] == "grid"
    assert len(points) == 9
    assert (Fraction(2), Fraction(0)) in points
    assert record["start"] == 0 and record["axis_derived"] == 3
    capped, record = roabp_hitting_set(1, 1, 10, DeskParams(roabp_values=4))
    assert record["axis"] == 4 and len(capped) == 4
    assert record["axis_derived"] == 11 and record["start"] == 2
    assert min(capped) == (Fraction(2),)


def test_roabp_random_backend():
    points, record = roabp_hitting_set(6, 2, 3, DeskParams(), seed=4)
    assert record["backend"] == "random"
    assert len(points) == 20
    assert all(len(p) == 6 and 0 <= min(p) and max(p) <= record["range"] for p in points)
    again, _ = roabp_hitting_set(6, 2, 3, DeskParams(), seed=4)
    assert again == points


def test_roabp_rejects_bad_shapes():
    with pytest.raises(InfeasibleParametersError):
        roabp_hitting_set(65, 1, 1, DeskParams())
    with pytest.raises(InfeasibleParametersError):
        roabp_hitting_set(0, 1, 1, DeskParams())


def test_strong_hitting_set_shape():
    hs = strong_hitting_set_genabp(1, 1, 2, DivAlgebra(2, 1), DeskParams())
    assert hs.dim == 4
    assert hs.meta["blockdim"] == 2
    assert len(hs) == 9
    assert all(p[0].shape == (4, 4) for p in hs)
    assert hs.certifications[0]["backend"] == "grid"


def test_strong_hitting_set_certifies_twisted_words():
    algebra = DivAlgebra(2, 1)
    family = twisted_word_family(algebra, 1, 1)
    assert len(family) == 9
    hs = strong_hitting_set_genabp(1, 1, 1, algebra, DeskParams())
    assert len(hs) == 3
    assert certify_family(hs, family) == [0] * 9
    recorded = hs.meta["derivation"]["family"]
    assert recorded["kind"] == "twisted-words" and recorded["witnesses"] == [0] * 9
    assert hs.certifications[0]["certifies"] == list(range(9))
    assert hs.certifications[1]["certifies"] == []
    assert hs.meta["derivation"]["start"] == 2


def test_strong_hitting_set_rejects_an_uncertified_family(monkeypatch):
    monkeypatch.setattr("ncrit.genabp.certify_family", lambda points, family: [0] + [None] * (len(family) - 1))
    with pytest.raises(CertificationError):
        strong_hitting_set_genabp(1, 1, 1, DivAlgebra(2, 1), DeskParams())


@pytest.mark.parametrize("ell", range(1, 7))
@pytest.mark.parametrize("d", range(1, 7))
def test_q0_conjugation_on_random_matrices(ell, d):
    rng = random.Random(ell * 10 + d)
    a = linalg.rational_matrix([[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(ell)] for _ in range(ell)])
    q0 = q0_matrix(ell, d)
    assert linalg.matrices_equal(q0 @ embed(a, d, IOTA_LEFT) @ q0.T, embed(a, d, IOTA_RIGHT))


def test_block_structure_on_random_words():
    rng = random.Random(7)
    algebra = DivAlgebra(2, 1)
    K = algebra.field
    for _ in range(100):
        d = rng.randint(1, 3)
        coefficients = [linalg.matrix([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)], K) for _ in range(d + 1)]
        word = [rng.randint(1, 2) for _ in range(d)]
        B = GenABP.from_word(coefficients, word)
        full = evaluate_substitution(B, ShiftedSubstitution(algebra, 2, d))
        assert _blocks_match(full, shifted_cyclic_eval(B, algebra, n=2), 2), word
