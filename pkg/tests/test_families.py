from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from quiverstab import corpus
from quiverstab import families as fm
from quiverstab import stability as st
from quiverstab.errors import ClassMismatch, DegreeError, ParseError, RelationError, ShapeError

FAMILIES = corpus.bundled_families()
BY_NAME = {f.name: (f, p) for f, p in FAMILIES}


def test_bundled_family_corpus():
    assert len(FAMILIES) >= 6
    assert {"taut", "const"} <= set(BY_NAME)


def test_parse_poly():
    assert fm.parse_poly("s^2 + 2*s*t - t^2", 3) == fm.poly_from_dict({(2, 0): 1, (1, 1): 2, (0, 2): 2}, 3)
    assert fm.parse_poly("3*s", 3) == ()
    assert fm.parse_poly("t - s", 5) == fm.parse_poly("4*s + t", 5)
    with pytest.raises(ParseError):
        fm.parse_poly("s ^ x", 3)
    with pytest.raises(ParseError):
        fm.parse_poly("", 3)


@settings(max_examples=60, deadline=None)
@given(hst.dictionaries(hst.tuples(hst.integers(0, 3), hst.integers(0, 3)), hst.integers(-5, 5), max_size=5))
def test_poly_str_round_trip(d):
    poly = fm.poly_from_dict(d, 5)
    if poly:
        assert fm.parse_poly(fm.poly_str(poly), 5) == poly


def test_coefficient_list_is_s_to_t():
    assert fm.poly_from_coeffs([1, 0], 3) == fm.parse_poly("s", 3)
    assert fm.poly_from_coeffs([0, 1], 3) == fm.parse_poly("t", 3)


def test_fibers_of_tautological_family():
    fam, _ = BY_NAME["taut"]
    assert fm.points_p1(3) == [(1, 0), (1, 1), (1, 2), (0, 1)]
    assert fm.fiber_at(fam, (1, 2)).mats == (((1,),), ((2,),))
    assert fm.fiber_at(fam, (0, 1)).mats == (((0,),), ((1,),))
    with pytest.raises(ValueError):
        fm.fiber_at(fam, (0, 0))


def test_degree_checks(k2):
    with pytest.raises(DegreeError, match="expected degree 1"):
        fm.check_structure(fm.make_family(k2, 3, {"1": [0], "2": [1]}, {"a": {(0, 0): "s^2"}}))
    with pytest.raises(DegreeError, match="must be zero"):
        fm.check_structure(fm.make_family(k2, 3, {"1": [1], "2": [0]}, {"a": {(0, 0): "1"}}))
    with pytest.raises(DegreeError, match="homogeneous"):
        fm.check_structure(fm.make_family(k2, 3, {"1": [0], "2": [1]}, {"a": {(0, 0): "s + 1"}}))
    with pytest.raises(ShapeError):
        fm.make_family(k2, 3, {"1": [0], "2": [1]}, {"a": {(1, 0): "s"}})
    with pytest.raises(ShapeError):
        fm.make_family(k2, 3, {"x": [0]})


def test_relation_check_on_families():
    pres = corpus.bundled_presentation("loop_x2")
    bad = fm.make_family(pres, 2, {"1": [0, 1]}, {"x": {(1, 0): "s", (0, 1): [0]}})
    fm.check_structure(bad)  # x^2 = 0 holds
    worse = fm.make_family(pres, 3, {"1": [0, 0]}, {"x": {(0, 0): "1"}})
    with pytest.raises(RelationError) as info:
        fm.check_structure(worse)
    assert info.value.relation_index == 0


def test_class_mismatch():
    fam, _ = BY_NAME["taut"]
    with pytest.raises(ClassMismatch):
        fm.ell_dot_C_determinant(fam, st.make_params((-1, 2), v=(2, 1)))


def test_normalization_gives_c_one():
    v = (1, 1)
    for xi in (Fraction(0), Fraction(1), Fraction(-2, 3)):
        lam_v = 1 / (xi * xi + 1)
        params = st.make_params((-1, 1), (lam_v / 2, lam_v / 2), xi, v)
        assert fm.c_lambda_xi(params) == 1
        fam, _ = BY_NAME["taut"]
        assert fm.ell_dot_C_determinant(fam, params).value == 1


@pytest.mark.parametrize("idx", range(len(FAMILIES)))
def test_route_equality_and_twist_invariance(idx):
    fam, _ = FAMILIES[idx]
    rng = random.Random(f"routes-{fam.name}")
    for _ in range(50):
        params = st.random_params(fam.v, rng)
        a = fm.ell_dot_C_determinant(fam, params)
        b = fm.ell_dot_C_charge(fam, params)
        assert a.value == b.value and a.c == b.c
        assert fm.ell_dot_C_determinant(fam.twisted(rng.randint(-4, 4)), params).value == a.value


def test_tautological_family_is_positive():
    fam, params = BY_NAME["taut"]
    rep = fm.positivity_report(fam, params)
    assert rep.ell_determinant == rep.ell_charge == Fraction(1, 2)
    assert rep.pairwise_distinct and rep.verdict == "confirmed_positive"


def test_constant_families_are_zero():
    for name in ("const", "twisted"):
        fam, params = BY_NAME[name]
        rep = fm.positivity_report(fam, params)
        assert rep.ell_determinant == 0 and rep.all_s_equivalent
        assert rep.verdict == "confirmed_zero"


@pytest.mark.parametrize("idx", range(len(FAMILIES)))
def test_theta_zero_gives_zero(idx):
    fam, params = FAMILIES[idx]
    zero = st.StabilityParams(tuple(Fraction(0) for _ in fam.v), params.lam, params.xi, fam.v)
    rep = fm.positivity_report(fam, zero)
    assert rep.ell_determinant == rep.ell_charge == 0
    assert rep.all_s_equivalent and rep.verdict == "confirmed_zero"


@pytest.mark.parametrize("idx", range(len(FAMILIES)))
def test_nef_on_bundled_families(idx):
    fam, params = FAMILIES[idx]
    rep = fm.positivity_report(fam, params)
    assert rep.nef and rep.routes_agree and rep.ell_determinant >= 0


def test_finite_field_flag():
    fam, params = BY_NAME["rank2"]
    rep = fm.positivity_report(fam, params)
    # positive degree but every F_3-fiber is isomorphic: the sample cannot see the jump
    assert rep.ell_determinant > 0 and rep.all_s_equivalent
    assert rep.verdict == "flagged"
    assert "finite" in rep.to_json()["note"].lower()


def test_unstable_fiber_is_rejected(k2):
    from quiverstab.errors import NotSemistableError

    fam = fm.make_family(k2, 3, {"1": [0], "2": [1]}, {"a": {(0, 0): "s"}})
    with pytest.raises(NotSemistableError):
        fm.check_family(fam, st.make_params((-1, 1), v=(1, 1)))
