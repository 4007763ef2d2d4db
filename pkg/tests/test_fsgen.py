import json
from fractions import Fraction

import pytest

from ncrit import linalg
from ncrit.exceptions import InfeasibleParametersError
from ncrit.fsgen import (
    HittingSet,
    abp_family,
    base_generator,
    evaluate_word_polynomial,
    family_words,
    generator_for,
    hitting_set_in_D,
    is_sigma_compatible,
    lagrange_basis,
    materialize,
    passing_alphas,
    point_elements,
    poly_eval,
    rational_shift_points,
    schedule,
)
from ncrit.utils import DeskParams


def test_desk_schedule():
    sched = schedule(2, 2, 1, kappa=1)
    assert (sched.d, sched.L, sched.ell) == (0, 2, 4)
    assert sched.W(1) == [1, 2, 3, 0]
    assert sched.to_dict()["mode"] == "desk"


def test_full_size_schedule_picks_kappa():
    sched = schedule(2, 1, 1, mode="paper-faithful")
    assert sched.kappa == 3
    assert sched.ell == 64
    assert schedule(1, 1, 1, mode="paper-faithful").kappa == 1


def test_schedule_rejects_bad_parameters():
    with pytest.raises(InfeasibleParametersError):
        schedule(2, 2, 2, kappa=1)
    with pytest.raises(ValueError):
        schedule(2, 2, 3, kappa=2)
    with pytest.raises(ValueError):
        schedule(2, 2, 1, mode="fast")
    with pytest.raises(ValueError):
        schedule(0, 2, 1, kappa=1)


def test_lagrange_basis_is_a_delta():
    basis = lagrange_basis(3)
    for t, poly in enumerate(basis, start=1):
        assert [poly_eval(poly, Fraction(u)) for u in (1, 2, 3)] == [1 if u == t else 0 for u in (1, 2, 3)]


def test_base_generator_is_powers_of_v():
    sched = schedule(3, 1, 1, kappa=1)
    g = base_generator(sched)
    v = Fraction(2)
    assert [poly_eval(g.position(i, 0), v) for i in (1, 2, 3)] == [1, 2, 4]


def test_combined_generator_is_sigma_compatible():
    sched = schedule(2, 2, 2, kappa=2)
    assert sched.ell == 16
    g = generator_for(sched, [sched.W(1)[0]])
    assert g.level == 1
    assert is_sigma_compatible(g, sched)
    point = materialize(g, sched, 1)
    assert point.certification["sigma_chain_ok"]
    assert point.certification["in_D"]


def test_combine_rejects_seed_outside_level_set():
    sched = schedule(1, 1, 2, kappa=2)
    with pytest.raises(ValueError):
        generator_for(sched, [1])


def test_level_zero_set_hits_linear_family():
    sched = schedule(2, 1, 1, kappa=1)
    hs = hitting_set_in_D(sched, DeskParams())
    assert len(hs) == 4
    assert hs.meta["field"] == "K" and hs.dim == 4
    assert all(record["det_nonzero"] for record in hs.certifications)
    elements = [point_elements(point, sched.algebra) for point in hs]
    for poly in abp_family(2, 1):
        assert any(evaluate_word_polynomial(poly, e) for e in elements), poly


DEGREE_TWO = {
    "x1^2 - x2^2": {(1, 1): 1, (2, 2): -1},
    "x1 x2 - x2 x1": {(1, 2): 1, (2, 1): -1},
    "x1^2 - x1": {(1, 1): 1, (1,): -1},
}


def test_level_one_set_hits_degree_two_family():
    desk = DeskParams.level_one()
    sched = schedule(2, desk.fs_width, 2**desk.fs_depth, kappa=desk.kappa)
    hs = hitting_set_in_D(sched, desk)
    assert hs.meta["ell"] == 16 and len(hs) > 0
    elements = [point_elements(point, sched.algebra) for point in hs]
    for name, poly in DEGREE_TWO.items():
        assert any(evaluate_word_polynomial(poly, e) for e in elements), name


def test_level_zero_set_misses_a_square_difference():
    sched = schedule(2, 1, 1, kappa=1)
    elements = [point_elements(point, sched.algebra) for point in hitting_set_in_D(sched, DeskParams())]
    assert not any(evaluate_word_polynomial(DEGREE_TWO["x1^2 - x2^2"], e) for e in elements)


def test_hitting_set_serializes():
    sched = schedule(2, 1, 1, kappa=1)
    hs = hitting_set_in_D(sched, DeskParams())
    data = json.loads(json.dumps(hs.to_dict()))
    again = HittingSet.from_dict(data)
    assert len(again) == len(hs)
    assert linalg.matrices_equal(again.points[2][1], hs.points[2][1])
    assert again.certifications[0]["dets"] == hs.certifications[0]["dets"]
    data["header"]["count"] = 99
    with pytest.raises(ValueError):
        HittingSet.from_dict(data)


def test_span_preserved_for_constant_factors():
    sched = schedule(1, 1, 2, kappa=2)
    one = linalg.rational_matrix([[1]])
    prev = base_generator(sched)
    assert passing_alphas(prev, sched, [[one, one]], [[one, one]]) == sched.W(1)


def test_rational_shift_points_separate_words():
    (point,) = rational_shift_points(2, 2, [2])
    x1, x2 = point
    assert x1[0, 1] == 2 and x1[1, 2] == 8
    assert x2[0, 1] == 4 and x2[1, 2] == 64
    assert (x1 @ x2)[0, 2] == 2**7
    assert (x2 @ x1)[0, 2] == 2**5


def test_family_words():
    assert family_words(2, 1) == [(), (1,), (2,)]
    assert len(family_words(2, 2, homogeneous=True)) == 4
    assert sum(1 for _ in abp_family(1, 1, coefficients=(0, 1))) == 3
