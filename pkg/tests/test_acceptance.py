"""Acceptance criteria 1-9, each reported as one PASS/FAIL line.

The corpus is built once per session so submodule lattices computed for
criterion 1 are reused by the stability suites.
"""

from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

import pytest

from quiverstab import corpus
from quiverstab import families as fm
from quiverstab import knum
from quiverstab import oracles
from quiverstab import representation as rp
from quiverstab import stability as st
from quiverstab import walls as wl
from quiverstab.errors import NotSemistableError
from quiverstab.quiver import is_acyclic

QUIVERS = ["k2", "a3", "loop_x2", "kron3"]
SEED = 20240601


@pytest.fixture(scope="module")
def blocks():
    return corpus.build_corpus(QUIVERS, 2, 6, SEED) + corpus.build_corpus(QUIVERS, 3, 4, SEED)


def _draws(block, count=20):
    """``count`` seeded parameter draws for one dimension class, the first at theta = 0."""
    rng = random.Random(f"{SEED}-{block.quiver}-{block.dims}-{block.p}")
    zero = st.StabilityParams(tuple(Fraction(0) for _ in block.dims), tuple(Fraction(1) for _ in block.dims), Fraction(0), block.dims)
    return [zero] + [st.random_params(block.dims, rng) for _ in range(count - 1)]


def test_criterion_1_submodule_oracle(blocks, acceptance_report):
    start = time.perf_counter()
    mismatches = []
    count = 0
    for b in blocks:
        for m in b.reps:
            count += 1
            ours = {s.spaces for s in rp.all_submodules(m)}
            if ours != oracles.submodule_oracle(m):
                mismatches.append((b.quiver, b.p, m.mats))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 60
    acceptance_report(1, ok, f"{count} representations, {len(mismatches)} mismatches, {elapsed:.1f}s (target < 60s)")
    assert not mismatches, mismatches[:5]
    assert elapsed < 60


def test_criterion_2_theta_sigma_agreement(blocks, acceptance_report):
    bad = []
    checks = 0
    for b in blocks:
        draws = _draws(b)
        for m in b.reps:
            if not m.total_dim:
                continue
            for params in draws:
                checks += 1
                t, s = st.is_theta_semistable(m, params), st.is_sigma_semistable(m, params)
                ts, ss = st.is_theta_stable(m, params), st.is_sigma_stable(m, params)
                if t != s or ts != ss:
                    bad.append((b.quiver, m.mats, params))
    acceptance_report(2, not bad, f"{checks} (module, draw) checks, {len(bad)} disagreements")
    assert not bad, bad[:5]


def test_criterion_3_support_property(blocks, acceptance_report):
    bad = []
    checks = 0
    for b in blocks:
        for params in _draws(b):
            c = st.support_constant(params)
            for m in b.reps:
                if not m.total_dim:
                    continue
                checks += 1
                z = st.central_charge(params, m.dims)
                if z.abs2() < c * c * max(m.dims) ** 2 or not st.support_holds(params, m.dims):
                    bad.append((b.quiver, m.dims, params))
    acceptance_report(3, not bad, f"{checks} checks, {len(bad)} violations")
    assert not bad, bad[:5]


def test_criterion_4_euler_oracle(acceptance_report):
    bad = []
    pairs = 0
    for name in QUIVERS:
        pres = corpus.bundled_presentation(name)
        if not is_acyclic(pres.quiver) or pres.relations:
            continue
        euler = knum.euler_form_acyclic(pres)
        reps = [m for b in corpus.build_corpus([name], 2, 4, SEED) for m in b.reps]
        for m, n in itertools.product(reps, repeat=2):
            pairs += 1
            if euler.chi(m.dims, n.dims) != oracles.euler_oracle(m, n):
                bad.append((name, m.mats, n.mats))
    pairing_ok = all(knum.verify_perfect_pairing(corpus.bundled_presentation(q), 2).passed for q in ("k2", "a3"))
    ok = not bad and pairing_ok
    acceptance_report(4, ok, f"{pairs} pairs, {len(bad)} mismatches; delta pairing on K2 and A3: {pairing_ok}")
    assert not bad, bad[:5]
    assert pairing_ok


def test_criterion_5_route_equality(acceptance_report):
    fams = corpus.bundled_families()
    bad = []
    for fam, _ in fams:
        rng = random.Random(f"{SEED}-{fam.name}")
        for _ in range(50):
            params = st.random_params(fam.v, rng)
            a = fm.ell_dot_C_determinant(fam, params).value
            b = fm.ell_dot_C_charge(fam, params).value
            if a != b:
                bad.append((fam.name, params, a, b))
    ok = not bad and len(fams) >= 6
    acceptance_report(5, ok, f"{len(fams)} families x 50 draws, {len(bad)} disagreements")
    assert len(fams) >= 6
    assert not bad, bad[:5]


def test_criterion_6_positivity_dichotomy(acceptance_report):
    problems = []
    by_name = {}
    for fam, params in corpus.bundled_families():
        by_name[fam.name] = fam
        rng = random.Random(f"{SEED}-nef-{fam.name}")
        for params_k in [params] + [st.random_params(fam.v, rng) for _ in range(10)]:
            value = fm.ell_dot_C_determinant(fam, params_k).value
            try:
                fm.check_family(fam, params_k)
            except NotSemistableError:
                continue  # the hypothesis of the nef statement fails for this draw
            if value < 0:
                problems.append(f"{fam.name}: l.C = {value} < 0")
        zero = st.StabilityParams(tuple(Fraction(0) for _ in fam.v), params.lam, params.xi, fam.v)
        rep0 = fm.positivity_report(fam, zero)
        if rep0.ell_determinant != 0 or not rep0.all_s_equivalent:
            problems.append(f"{fam.name}: theta = 0 gives {rep0.ell_determinant}, classes {rep0.s_classes}")
    k2_params = st.make_params((-1, 1), (1, 1), 0, (1, 1))
    taut = fm.positivity_report(by_name["taut"], k2_params)
    if taut.ell_determinant != Fraction(1, 2) or taut.ell_charge != Fraction(1, 2) or not taut.pairwise_distinct:
        problems.append(f"taut: {taut.ell_determinant}, classes {taut.s_classes}")
    const = fm.positivity_report(by_name["const"], k2_params)
    if const.ell_determinant != 0 or not const.all_s_equivalent:
        problems.append(f"const: {const.ell_determinant}, classes {const.s_classes}")
    acceptance_report(6, not problems, f"taut = {taut.ell_determinant}, const = {const.ell_determinant}; {len(problems)} problems")
    assert not problems, problems


def test_criterion_7_normalization(acceptance_report):
    bad = []
    checks = 0
    for fam, _ in corpus.bundled_families():
        rng = random.Random(f"{SEED}-norm-{fam.name}")
        for _ in range(50):
            raw = st.random_params(fam.v, rng)
            lam_v = sum(l * x for l, x in zip(raw.lam, fam.v))
            target = 1 / (raw.xi * raw.xi + 1)
            params = st.StabilityParams(raw.theta, tuple(l * target / lam_v for l in raw.lam), raw.xi, fam.v)
            checks += 1
            c = fm.c_lambda_xi(params)
            direct = sum((t * d for t, d in zip(params.theta, fm.det_degrees(fam))), Fraction(0))
            det = fm.ell_dot_C_determinant(fam, params).value
            chg = fm.ell_dot_C_charge(fam, params).value
            if c != 1 or det != direct or chg != direct:
                bad.append((fam.name, params))
    acceptance_report(7, not bad, f"{checks} normalized draws, {len(bad)} failures")
    assert not bad, bad[:5]


def test_criterion_8_walls_and_chambers(acceptance_report):
    start = time.perf_counter()
    pres = corpus.bundled_presentation("k2")
    v = (1, 1)
    walls = wl.potential_walls(v)
    chs = wl.chambers(v, walls)
    problems = []
    if len(walls) != 1 or len(chs) != 2:
        problems.append(f"{len(walls)} walls, {len(chs)} chambers")
    summaries = {}
    for ch in chs:
        c1 = wl.census(pres, v, ch.witness, 2)
        c2 = wl.census(pres, v, ch.witness2, 2)
        if ch.witness == ch.witness2:
            problems.append(f"chamber {ch.signs}: witnesses coincide")
        if [(e.rep, e.status) for e in c1.entries] != [(e.rep, e.status) for e in c2.entries]:
            problems.append(f"chamber {ch.signs}: census differs between witnesses")
        summaries[ch.signs] = c1.summary()
    # theta = (-1, 1) lies in the chamber where theta(1,0) < 0
    want = {
        "-": {"stable": 3, "strictly_semistable": 0, "unstable": 1},
        "+": {"stable": 0, "strictly_semistable": 0, "unstable": 4},
    }
    if summaries != want:
        problems.append(f"census {summaries}")
    elapsed = time.perf_counter() - start
    if elapsed >= 5:
        problems.append(f"took {elapsed:.1f}s")
    acceptance_report(8, not problems, f"{len(walls)} wall, {len(chs)} chambers, census {summaries}, {elapsed:.2f}s")
    assert not problems, problems


def _hn_violations(m, params, seeds):
    out = []
    hn = st.hn_filtration(m, params)
    for z1, z2 in zip(hn.charges, hn.charges[1:]):
        if st.phase_compare(z1, z2) != st.GREATER:
            out.append("phases not strictly decreasing")
    if not all(st.is_sigma_semistable(f, params) for f in hn.factors):
        out.append("HN factor not semistable")
    if tuple(map(sum, zip(*hn.factor_dims))) != m.dims:
        out.append("HN dimensions not conserved")
    for s in seeds:
        if st.hn_filtration(m, params, shuffle_seed=s).factor_dims != hn.factor_dims:
            out.append(f"HN depends on enumeration order (shuffle {s})")
    return out


def _jh_violations(m, params, seeds):
    out = []
    jh = st.jh_factors(m, params)
    if jh.total_dims != m.dims:
        out.append("JH dimensions not conserved")
    if not all(st.is_sigma_stable(r, params) for r, _ in jh.classes):
        out.append("JH factor not stable")
    for s in seeds:
        if not st.same_jh(st.jh_factors(m, params, shuffle_seed=s), jh):
            out.append(f"JH depends on enumeration order (shuffle {s})")
    return out, jh


def test_criterion_9_hn_jh_suite(blocks, acceptance_report):
    seeds = range(5)
    problems = []
    hn_checked = jh_checked = rel_checked = 0
    for b in blocks:
        draws = _draws(b, 3)
        for params in draws:
            semis = []
            for m in b.reps:
                if not m.total_dim:
                    continue
                hn_checked += 1
                problems += [(b.quiver, m.mats, x) for x in _hn_violations(m, params, seeds)]
                if st.is_sigma_semistable(m, params):
                    jh_checked += 1
                    errs, jh = _jh_violations(m, params, seeds[:2])
                    problems += [(b.quiver, m.mats, x) for x in errs]
                    semis.append((m, jh))
            # s_equivalent: reflexive, symmetric, transitive on a bounded sample
            sample = semis[:8]
            rel = {}
            for (i, (m, jm)), (j, (n, jn)) in itertools.product(enumerate(sample), repeat=2):
                rel[i, j] = st.s_equivalent(m, n, params)
                rel_checked += 1
                if rel[i, j] != st.same_jh(jm, jn):
                    problems.append((b.quiver, m.mats, "s_equivalent disagrees with JH multisets"))
            k = len(sample)
            for i in range(k):
                if not rel[i, i]:
                    problems.append((b.quiver, sample[i][0].mats, "not reflexive"))
                for j in range(k):
                    if rel[i, j] != rel[j, i]:
                        problems.append((b.quiver, sample[i][0].mats, "not symmetric"))
                    for l in range(k):
                        if rel[i, j] and rel[j, l] and not rel[i, l]:
                            problems.append((b.quiver, sample[i][0].mats, "not transitive"))
    acceptance_report(
        9,
        not problems,
        f"{hn_checked} HN and {jh_checked} JH checks with 5 shuffles, {rel_checked} S-equivalence pairs, {len(problems)} violations",
    )
    assert not problems, problems[:5]
