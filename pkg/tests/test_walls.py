from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from quiverstab import corpus
from quiverstab import walls as wl
from quiverstab.errors import CapExceeded


def _theta_v(v, rng, bound=4):
    basis = wl.theta_basis(v)
    y = [Fraction(rng.randint(-bound * 8, bound * 8), rng.randint(1, 8)) for _ in basis]
    return tuple(sum(c * b[i] for c, b in zip(y, basis)) for i in range(len(v)))


def test_potential_walls_examples():
    (w,) = wl.potential_walls((1, 1))
    assert w.w == (1, 0) and set(w.members) == {(1, 0), (0, 1)}
    assert wl.potential_walls((1, 0)) == []


def test_potential_walls_v21_is_a_single_hyperplane():
    # Theta_v is a line for v=(2,1); every candidate cuts it at the origin
    walls = wl.potential_walls((2, 1))
    assert len(walls) == 1
    assert set(walls[0].members) == {(1, 0), (2, 0), (0, 1), (1, 1)}


def test_degenerate_walls_are_separated():
    walls = wl.potential_walls((2, 2), include_degenerate=True)
    deg = [w for w in walls if w.degenerate]
    assert len(deg) == 1 and (1, 1) in deg[0].members
    assert all(not w.degenerate for w in wl.potential_walls((2, 2)))


def test_chambers_examples():
    chs = wl.chambers((1, 1))
    assert len(chs) == 2
    assert {c.signs for c in chs} == {"+", "-"}
    for c in chs:
        sign = 1 if c.signs == "+" else -1
        assert sign * c.witness[0] > 0 and sum(c.witness) == 0
    (only,) = wl.chambers((1, 0))
    assert only.signs == ""


def test_chambers_a3():
    v = (1, 1, 1)
    walls = wl.potential_walls(v)
    chs = wl.chambers(v, walls)
    assert len(walls) == 3 and len(chs) == 6
    for c in chs:
        for wit in (c.witness, c.witness2):
            assert sum(t * x for t, x in zip(wit, v)) == 0
            assert wl.chamber_of(wit, walls) == c.signs
        assert c.witness != c.witness2


def test_chambers_cap():
    with pytest.raises(CapExceeded):
        wl.chambers((1, 1, 1), max_walls=2)


@settings(max_examples=60, deadline=None)
@given(hst.lists(hst.integers(0, 3), min_size=2, max_size=4).filter(any), hst.integers(0, 2**32))
def test_mirror_consistency(v, seed):
    v = tuple(v)
    rng = random.Random(seed)
    theta = _theta_v(v, rng)
    for w in itertools.product(*(range(x + 1) for x in v)):
        mirror = tuple(a - b for a, b in zip(v, w))
        assert sum(t * x for t, x in zip(theta, w)) == -sum(t * x for t, x in zip(theta, mirror))


@settings(max_examples=40, deadline=None)
@given(hst.sampled_from([(1, 1, 1), (1, 2, 1), (2, 1, 1), (1, 1, 2), (1, 0, 1), (2, 1)]), hst.integers(0, 2**32))
def test_fourier_motzkin_agrees_with_rejection_sampling(v, seed):
    rng = random.Random(seed)
    walls = wl.potential_walls(v)[:3]
    found = {c.signs for c in wl.chambers(v, walls)}
    sampled = set()
    for _ in range(400):
        s = wl.chamber_of(_theta_v(v, rng), walls)
        if s is not None:
            sampled.add(s)
    assert sampled <= found
    # every chamber of at most 3 hyperplanes through the origin is a cone of
    # positive measure, so enough samples should see all of them
    assert len(sampled) >= len(found) - 1


def test_fourier_motzkin_infeasible():
    assert wl.fourier_motzkin([((1,), 1), ((-1,), 1)], 1) is None
    y = wl.fourier_motzkin([((1, 0), 1), ((0, 1), 1), ((-1, -1), -5)], 2)
    assert y[0] >= 1 and y[1] >= 1 and y[0] + y[1] <= 5


def test_census_examples(k2):
    c = wl.census(k2, (1, 1), (-1, 1), 2)
    assert c.summary() == {"stable": 3, "strictly_semistable": 0, "unstable": 1}
    stable = sorted(e.rep.mats for e in c.by_status("stable"))
    assert stable == [(((0,),), ((1,),)), (((1,),), ((0,),)), (((1,),), ((1,),))]
    assert wl.census(k2, (1, 1), (0, 0), 2).summary() == {"stable": 0, "strictly_semistable": 4, "unstable": 0}
    assert wl.census(k2, (1, 1), (1, -1), 2).summary() == {"stable": 0, "strictly_semistable": 0, "unstable": 4}


def test_census_groups_isomorphism_classes(k2):
    c = wl.census(k2, (1, 1), (-1, 1), 3)
    assert c.total == 9
    assert sum(e.count for e in c.entries) == 9
    # over F_3 the stables are the 4 points of P^1
    assert c.summary()["stable"] == 4


def test_census_cap(k2):
    with pytest.raises(CapExceeded):
        wl.census(k2, (2, 2), (-1, 1), 2, cap=100)


def test_actual_walls_examples(k2, a3):
    (verdict,) = wl.actual_walls(k2, (1, 1))
    assert verdict.actual and verdict.points == ((0, 0),)
    assert wl.actual_walls(k2, (1, 0)) == []
    (verdict,) = wl.actual_walls(a3, (1, 0, 1))
    assert verdict.actual and len(verdict.witnesses) == 1


def test_actual_walls_a3():
    pres = corpus.bundled_presentation("a3")
    verdicts = {v.wall.w: v.actual for v in wl.actual_walls(pres, (1, 1, 1))}
    assert verdicts == {(1, 0, 0): True, (0, 0, 1): True, (0, 1, 0): False}


@pytest.mark.parametrize(
    "name,v", [("k2", (1, 1)), ("k2", (2, 1)), ("a3", (1, 1, 1)), ("kron3", (1, 1)), ("a3", (1, 0, 1)), ("k2", (1, 2))]
)
def test_chamber_constancy(name, v):
    pres = corpus.bundled_presentation(name)
    for ch in wl.chambers(v):
        c1 = wl.census(pres, v, ch.witness, 2)
        c2 = wl.census(pres, v, ch.witness2, 2)
        assert ch.witness != ch.witness2
        assert [(e.rep, e.status) for e in c1.entries] == [(e.rep, e.status) for e in c2.entries]


def test_plot_segments():
    segs = wl.plot_segments((1, 1, 1), wl.potential_walls((1, 1, 1)))
    assert len(segs) == 3
    with pytest.raises(ValueError):
        wl.plot_segments((1, 1), wl.potential_walls((1, 1)))
