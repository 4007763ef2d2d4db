from fractions import Fraction

import pytest

from ncrit.exceptions import DenominatorVanishesError, FieldMismatchError
from ncrit.fields import (
    QQ,
    CycloElem,
    CyclotomicFunctionField,
    KElem,
    Sigma,
    eval_at_rationals,
    field_of,
    is_power_of_two,
    sigma_apply,
)


def test_omega_to_half_order_is_minus_one():
    for order in (2, 4, 8, 16):
        assert CycloElem.omega(order, order // 2) == -1
        assert CycloElem.omega(order, order) == 1


def test_cyclo_inverse():
    a = CycloElem(8, [1, 1, 0, 3])
    assert a * a.inverse() == 1
    assert (a / a) == 1
    assert CycloElem.omega(8) ** -1 == CycloElem.omega(8, 7)


def test_cyclo_galois_maps_powers():
    w = CycloElem.omega(8)
    assert w.galois(3) == CycloElem.omega(8, 3)
    assert (1 + w).galois(5) == 1 + CycloElem.omega(8, 5)
    with pytest.raises(ValueError):
        w.galois(2)


def test_cyclo_evaluate_uses_reduced_representative():
    assert CycloElem(4, [1, 2]).evaluate(3) == 7
    # w^2 reduces to -1 before substitution
    assert CycloElem.omega(4, 2).evaluate(5) == -1


def test_k_arithmetic_reduces_fractions():
    z = KElem.z(4)
    f = (z + 1) / (z + 1)
    assert f == 1
    g = (z * z - 1) / (z - 1)
    assert g == z + 1
    assert g.is_polynomial()


def test_k_specialize_z():
    w = KElem.omega(4)
    assert (w + KElem.z(4)).specialize_z(2) == CycloElem(4, [2, 1])
    with pytest.raises(DenominatorVanishesError):
        (1 / KElem.z(4)).specialize_z(0)


def test_k_bidegree_and_degrees():
    value = KElem.omega(8) * KElem.z(8) ** 2
    assert value.bidegree() == 3
    assert value.z_degrees() == (2, 0)
    assert KElem.from_scalar(8, 5).bidegree() == 0


def test_field_orders_must_match():
    with pytest.raises(FieldMismatchError):
        KElem.omega(4) + KElem.omega(8)
    with pytest.raises(FieldMismatchError):
        CyclotomicFunctionField(4).coerce(KElem.omega(8))


def test_sigma_order_on_omega():
    assert Sigma(4, 1).exponent == 3
    assert Sigma(4, 1).order_on_omega() == 2
    assert Sigma(16, 2).order_on_omega() == 4
    assert Sigma(16, 2).power_exponent(2) == 9


def test_sigma_apply_fixes_z():
    sigma = Sigma(4, 1)
    assert sigma_apply(KElem.omega(4), sigma) == -KElem.omega(4)
    assert sigma_apply(KElem.z(4), sigma) == KElem.z(4)
    assert sigma_apply(Fraction(3, 2), sigma) == Fraction(3, 2)
    assert sigma.apply(KElem.omega(4), times=2) == KElem.omega(4)


def test_eval_at_rationals():
    element = KElem(4, [CycloElem.omega(4), 1])
    assert eval_at_rationals(element, 2, 3) == 5
    with pytest.raises(DenominatorVanishesError):
        eval_at_rationals(1 / KElem.z(4), 1, 0)


def test_field_of_and_power_of_two():
    assert field_of(Fraction(1)) == QQ
    assert field_of(KElem.z(4)) == CyclotomicFunctionField(4)
    assert is_power_of_two(16)
    assert not is_power_of_two(12)
