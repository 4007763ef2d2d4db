import random
from fractions import Fraction

import pytest

from ncrit import linalg
from ncrit.exceptions import FormulaSyntaxError
from ncrit.formula import (
    Add,
    Const,
    Inv,
    Mul,
    NotDefined,
    Var,
    corpus,
    corpus_entry,
    evaluate,
    is_nonzero_value,
    measures,
    parse,
    parse_lines,
    random_formula,
    subformulas,
    taylor_coefficients,
    to_text,
)


def test_parse_builds_the_tree():
    assert parse("x1*x2 + 3") == Add(Mul(Var(1), Var(2)), Const(Fraction(3)))
    assert parse("inv(x1)") == Inv(Var(1))
    assert parse("x1 - x2") == Add(Var(1), Mul(Const(Fraction(-1)), Var(2)))
    assert parse("-1/2*x1") == Mul(Const(Fraction(-1, 2)), Var(1))


def test_printed_corpus_parses_back():
    for entry in corpus():
        assert parse(to_text(entry.formula)) == entry.formula


def test_syntax_error_reports_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse("x1 + * x2")
    assert info.value.position == 5
    with pytest.raises(FormulaSyntaxError):
        parse("x0")
    with pytest.raises(FormulaSyntaxError):
        parse("inv(x1")
    with pytest.raises(FormulaSyntaxError):
        parse("1/0")
    with pytest.raises(FormulaSyntaxError):
        parse("x1 $ x2")


def test_parse_lines_skips_comments():
    formulas = parse_lines("# identities\nx1\n\ninv(x2)\n")
    assert formulas == [Var(1), Inv(Var(2))]


def test_measures():
    hua = corpus_entry("hua").formula
    size, height, nvars = measures(hua)
    assert height == 2
    assert nvars == 2
    assert size == len(list(subformulas(hua)))
    assert measures(parse("x3")) == (1, 0, 3)


def test_evaluate_scalars():
    point = [linalg.rational_matrix([[2]]), linalg.rational_matrix([[3]])]
    result = evaluate(parse("x1*x2 - inv(x1)"), point)
    assert result[0, 0] == Fraction(11, 2)


def test_evaluate_is_noncommutative():
    a = linalg.rational_matrix([[0, 1], [0, 0]])
    b = linalg.rational_matrix([[0, 0], [1, 0]])
    result = evaluate(corpus_entry("comm").formula, [a, b])
    assert linalg.matrices_equal(result, linalg.rational_matrix([[1, 0], [0, -1]]))


def test_evaluate_reports_undefined_gate():
    singular = linalg.rational_matrix([[1, 0], [0, 0]])
    result = evaluate(parse("x1 + inv(x1)"), [singular])
    assert isinstance(result, NotDefined)
    assert not result
    assert result.path == "add[1]/inv"
    assert not is_nonzero_value(result)


def test_identities_vanish_at_points():
    rng = random.Random(3)
    for name in ("inv-cancel", "hua", "inv-inv"):
        f = corpus_entry(name).formula
        point = [
            linalg.rational_matrix([[rng.randint(1, 5) for _ in range(2)] for _ in range(2)])
            for _ in range(f.variable_count)
        ]
        result = evaluate(f, point)
        assert isinstance(result, NotDefined) or linalg.is_zero_matrix(result)


def test_evaluate_needs_enough_matrices():
    with pytest.raises(ValueError):
        evaluate(parse("x2"), [linalg.identity(2)])


def test_taylor_of_inverse():
    # inv(1 + eps*x) = 1 - eps*x + eps^2*x^2 - ...
    one = linalg.rational_matrix([[1]])
    x = linalg.rational_matrix([[2]])
    coeffs = taylor_coefficients(parse("inv(x1)"), [one], [x], 3)
    assert [c[0, 0] for c in coeffs] == [1, -2, 4, -8]


def test_taylor_of_product():
    base = [linalg.rational_matrix([[1]]), linalg.rational_matrix([[2]])]
    direction = [linalg.rational_matrix([[3]]), linalg.rational_matrix([[5]])]
    coeffs = taylor_coefficients(parse("x1*x2"), base, direction, 2)
    # (1 + 3e)(2 + 5e) = 2 + 11e + 15e^2
    assert [c[0, 0] for c in coeffs] == [2, 11, 15]


def test_taylor_undefined_at_singular_base():
    zero = linalg.rational_matrix([[0]])
    result = taylor_coefficients(parse("inv(x1)"), [zero], [zero], 2)
    assert isinstance(result, NotDefined)


def test_random_formula_respects_height():
    rng = random.Random(11)
    for _ in range(20):
        f = random_formula(rng, 3, 7, max_height=1)
        assert f.height <= 1
        assert f.variable_count <= 3


def test_random_formula_size_is_an_upper_bound():
    rng = random.Random(4)
    for size in range(1, 12):
        for _ in range(5):
            assert random_formula(rng, 2, size).size <= size
            assert random_formula(rng, 2, size, max_height=0).size <= size
    assert random_formula(rng, 2, 2, max_height=0).size == 1
