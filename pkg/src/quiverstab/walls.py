"""Wall-and-chamber geometry on Theta_v = {theta : theta(v) = 0}.

Potential walls are the hyperplanes theta(w) = 0 for intermediate dimension
vectors 0 < w < v.  Chambers are found by exact Fourier-Motzkin elimination
over the rationals, and walls are tested for actuality by a census of all
representations at a point in the wall's relative interior.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from . import representation as rp
from .errors import CapExceeded, InfeasibleError, RelationError
from .quiver import QuiverPresentation
from .stability import classify, fmt, make_params

DEFAULT_CENSUS_CAP = 100_000
DEFAULT_FM_CAP = 50_000
MAX_WALLS = 24
MAX_VERTICES = 6


@dataclass(frozen=True)
class Wall:
    """The hyperplane theta(w) = 0 inside Theta_v; ``members`` lists every w giving it."""

    w: tuple[int, ...]
    members: tuple[tuple[int, ...], ...] = ()
    degenerate: bool = False

    def to_json(self) -> dict:
        return {"w": list(self.w), "members": [list(m) for m in self.members], "degenerate": self.degenerate}


@dataclass(frozen=True)
class Chamber:
    signs: str  # one '+' or '-' per wall, the sign of theta(w)
    witness: tuple  # rational theta with theta(v) = 0
    witness2: tuple = field(default=())

    def to_json(self) -> dict:
        out = {"signs": self.signs, "witness": [fmt(x) for x in self.witness]}
        if self.witness2:
            out["witness2"] = [fmt(x) for x in self.witness2]
        return out


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _normalize(vec) -> tuple:
    """Primitive integer vector with positive leading entry (for rational input too)."""
    vec = [Fraction(x) for x in vec]
    den = 1
    for x in vec:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    return tuple(-x for x in ints) if lead < 0 else tuple(ints)


def hyperplane_key(w: Sequence[int], v: Sequence[int]) -> tuple:
    """Normalized image of w in the dual of Theta_v; zero iff w is proportional to v."""
    vv = _dot(v, v)
    wv = _dot(w, v)
    return _normalize([vv * a - wv * b for a, b in zip(w, v)])


def _rep_key(w):
    return (sum(w), tuple(-x for x in w))


def potential_walls(v: Sequence[int], include_degenerate: bool = False) -> list[Wall]:
    """All distinct hyperplanes theta(w) = 0 with 0 <= w <= v, w not in {0, v}.

    Vectors giving the same hyperplane on Theta_v (w and v - w, or w and 2w)
    are merged; the representative has the smallest total dimension, then is
    lexicographically largest.  Vectors proportional to v vanish on all of
    Theta_v and only appear, flagged degenerate, with ``include_degenerate``.
    """
    v = tuple(int(x) for x in v)
    if any(x < 0 for x in v) or not any(v):
        raise ValueError("v must be a nonzero dimension vector")
    groups: dict[tuple, list] = {}
    for w in itertools.product(*(range(x + 1) for x in v)):
        if not any(w) or w == v:
            continue
        groups.setdefault(hyperplane_key(w, v), []).append(w)
    walls = []
    for key, members in groups.items():
        members.sort(key=_rep_key)
        degenerate = not any(key)
        if degenerate and not include_degenerate:
            continue
        walls.append(Wall(members[0], tuple(members), degenerate))
    walls.sort(key=lambda wl: (wl.degenerate, _rep_key(wl.w)))
    return walls


# ---------------------------------------------------------------- Theta_v


def theta_basis(v: Sequence[int]) -> list[tuple]:
    """Rational basis of Theta_v (the kernel of theta -> theta(v))."""
    ker = la.kernel((tuple(v),), None, len(v))
    return [tuple(Fraction(x) for x in b) for b in ker.basis]


def _combine(basis, y) -> tuple:
    n = len(basis[0]) if basis else 0
    return tuple(sum((c * b[i] for c, b in zip(y, basis)), Fraction(0)) for i in range(n))


# ---------------------------------------------------------- Fourier-Motzkin


def _fm_norm(a, b):
    """Scale ``a.y >= b`` so the first nonzero |coefficient| is 1 (for dedup)."""
    lead = next((abs(x) for x in a if x), None)
    if lead is None:
        return tuple(a), b
    return tuple(x / lead for x in a), b / lead


def fourier_motzkin(constraints, nvars: int, cap: int = DEFAULT_FM_CAP):
    """Solve ``a.y >= b`` exactly; returns a rational point or None if infeasible."""
    systems = []
    cur = {_fm_norm(tuple(Fraction(x) for x in a), Fraction(b)) for a, b in constraints}
    for k in range(nvars):
        systems.append(cur)
        pos = [(a, b) for a, b in cur if a[k] > 0]
        neg = [(a, b) for a, b in cur if a[k] < 0]
        nxt = {(a, b) for a, b in cur if a[k] == 0}
        if len(pos) * len(neg) + len(nxt) > cap:
            raise CapExceeded(f"Fourier-Motzkin system exceeds {cap} inequalities", partial=len(cur))
        for ap, bp in pos:
            for an, bn in neg:
                sp, sn = -an[k], ap[k]
                a = tuple(sp * x + sn * y for x, y in zip(ap, an))
                nxt.add(_fm_norm(a, sp * bp + sn * bn))
        cur = nxt
    if any(b > 0 for _, b in cur):
        return None
    y = [Fraction(0)] * nvars
    for k in reversed(range(nvars)):
        lo, hi = None, None
        for a, b in systems[k]:
            if a[k] == 0:
                continue
            rest = sum((a[j] * y[j] for j in range(k + 1, nvars)), Fraction(0))
            bound = (b - rest) / a[k]
            if a[k] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        y[k] = _pick(lo, hi)
    return tuple(y)


def _pick(lo, hi) -> Fraction:
    """A simple rational in [lo, hi]: an integer nearest 0 if one fits, else the midpoint."""
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return Fraction(min(0, math.floor(hi)))
    if hi is None:
        return Fraction(max(0, math.ceil(lo)))
    if lo > hi:
        raise InfeasibleError("inconsistent bounds during back-substitution")
    if lo <= 0 <= hi:
        return Fraction(0)
    c = math.ceil(lo) if lo > 0 else math.floor(hi)
    if lo <= c <= hi:
        return Fraction(c)
    return (lo + hi) / 2


# ---------------------------------------------------------------- chambers


def _check_sizes(v, walls, max_walls, max_vertices):
    if len(walls) > max_walls:
        raise CapExceeded(f"{len(walls)} walls exceed the chamber-enumeration limit {max_walls}")
    if len(v) > max_vertices:
        raise CapExceeded(f"{len(v)} vertices exceed the chamber-enumeration limit {max_vertices}")


def _sign_constraints(forms, signs):
    return [(tuple(s * x for x in f), 1) for f, s in zip(forms, signs)]


def _second_witness(y, forms, signs, nvars):
    """Another interior point, moved along the first free direction."""
    if nvars == 0:
        return None
    direction = [Fraction(int(k == 0)) for k in range(nvars)]
    t = Fraction(1)
    for f, s in zip(forms, signs):
        val = s * _dot(f, y)
        slope = s * _dot(f, direction)
        if slope < 0:
            t = min(t, val / (-slope) / 2)
    return tuple(a + t * d for a, d in zip(y, direction))


def _regions(forms, nvars, fm_cap):
    """Feasible strict sign vectors of the central arrangement ``forms`` in y-space."""
    partial = [((), tuple([Fraction(0)] * nvars))]
    for k in range(len(forms)):
        nxt = []
        for signs, _ in partial:
            for s in (1, -1):
                cand = signs + (s,)
                y = fourier_motzkin(_sign_constraints(forms[: k + 1], cand), nvars, fm_cap)
                if y is not None:
                    nxt.append((cand, y))
        partial = nxt
    return partial


def chambers(
    v: Sequence[int],
    walls: Sequence[Wall] | None = None,
    max_walls: int = MAX_WALLS,
    max_vertices: int = MAX_VERTICES,
    fm_cap: int = DEFAULT_FM_CAP,
) -> list[Chamber]:
    """Every realizable strict sign vector on Theta_v, with rational interior witnesses.

    Walls are added one at a time and each extended sign vector is kept only
    if Fourier-Motzkin finds a point with every ``+-theta(w) >= 1`` (the
    cone condition, equivalent to strict feasibility).  Degenerate walls are
    skipped.
    """
    v = tuple(int(x) for x in v)
    if walls is None:
        walls = potential_walls(v)
    walls = [w for w in walls if not w.degenerate]
    _check_sizes(v, walls, max_walls, max_vertices)
    basis = theta_basis(v)
    nvars = len(basis)
    forms = [tuple(_dot(b, w.w) for b in basis) for w in walls]
    partial = _regions(forms, nvars, fm_cap)
    out = []
    for signs, y in partial:
        y2 = _second_witness(y, forms, signs, nvars)
        out.append(
            Chamber(
                "".join("+" if s > 0 else "-" for s in signs),
                _combine(basis, y) if nvars else tuple(Fraction(0) for _ in v),
                _combine(basis, y2) if y2 is not None else (),
            )
        )
    out.sort(key=lambda c: c.signs)
    return out


def chamber_of(theta: Sequence, walls: Sequence[Wall]) -> str | None:
    """Sign string of theta, or None if it lies on some wall."""
    out = []
    for w in walls:
        if w.degenerate:
            continue
        s = _dot([Fraction(t) for t in theta], w.w)
        if s == 0:
            return None
        out.append("+" if s > 0 else "-")
    return "".join(out)


def wall_interior_points(v: Sequence[int], wall: Wall, walls: Sequence[Wall], fm_cap: int = DEFAULT_FM_CAP):
    """One rational theta in each connected piece of ``wall`` minus the other walls."""
    basis = theta_basis(v)
    nvars = len(basis)
    form = tuple(_dot(b, wall.w) for b in basis)
    # coordinates on the wall: kernel of the wall's form in y-space
    sub = la.kernel((form,), None, nvars).basis if nvars else ()
    sub = [tuple(Fraction(x) for x in b) for b in sub]
    others = []
    for w in walls:
        if w.degenerate or w.w == wall.w:
            continue
        f = tuple(_dot(b, w.w) for b in basis)
        g = tuple(_dot(s, f) for s in sub)
        if not any(g):
            raise InfeasibleError(f"wall {list(w.w)} contains wall {list(wall.w)}; no interior point off other walls")
        others.append(g)
    points = []
    for _, z in _regions(others, len(sub), fm_cap):
        y = _combine(sub, z) if sub else tuple(Fraction(0) for _ in range(nvars))
        points.append(_combine(basis, y) if nvars else tuple(Fraction(0) for _ in v))
    if not points:
        raise InfeasibleError(f"no point of wall {list(wall.w)} avoids the other walls")
    return points


# ------------------------------------------------------------------ census


@dataclass(frozen=True)
class CensusEntry:
    rep: rp.Representation
    status: str  # stable | strictly_semistable | unstable
    count: int  # matrix tuples in this isomorphism class
    grouped: bool = True  # False if iso grouping hit its cap

    def to_json(self) -> dict:
        return {"status": self.status, "count": self.count, "grouped": self.grouped, "rep": self.rep.to_json()}


@dataclass(frozen=True)
class Census:
    v: tuple
    theta: tuple
    p: int
    total: int  # relation-satisfying matrix tuples
    entries: tuple
    warnings: tuple = ()

    def by_status(self, status: str) -> list[CensusEntry]:
        return [e for e in self.entries if e.status == status]

    def summary(self) -> dict:
        return {s: len(self.by_status(s)) for s in ("stable", "strictly_semistable", "unstable")}

    def to_json(self) -> dict:
        return {
            "v": list(self.v),
            "theta": [fmt(t) for t in self.theta],
            "p": self.p,
            "total": self.total,
            "summary": self.summary(),
            "classes": [e.to_json() for e in self.entries],
            "warnings": list(self.warnings),
        }


def all_representations(pres: QuiverPresentation, v: Sequence[int], p: int, cap: int = DEFAULT_CENSUS_CAP):
    """Every relation-satisfying matrix tuple of dimension v, in lexicographic order."""
    q = pres.quiver
    v = tuple(v)
    shapes = [(v[q.vertex_index[a.target]], v[q.vertex_index[a.source]]) for a in q.arrows]
    entries = sum(r * c for r, c in shapes)
    if p**entries > cap:
        raise CapExceeded(f"{p}^{entries} matrix tuples exceed census cap {cap}", partial=0)
    for flat in itertools.product(range(p), repeat=entries):
        mats, pos = [], 0
        for r, c in shapes:
            mats.append(tuple(tuple(flat[pos + i * c : pos + (i + 1) * c]) for i in range(r)))
            pos += r * c
        try:
            yield rp.Representation(pres, p, v, tuple(mats))
        except RelationError:
            continue


def _bucket_key(m: rp.Representation, status: str):
    ranks = tuple(la.rank(mat, m.p, len(mat[0]) if mat else 0) for mat in m.mats)
    return (status, ranks, rp.submodule_dim_vectors(m), rp._end_dim(m))


def census(
    pres: QuiverPresentation,
    v: Sequence[int],
    theta: Sequence,
    p: int,
    cap: int = DEFAULT_CENSUS_CAP,
    iso_cap: int = rp.DEFAULT_ISO_CAP,
    sub_cap: int = rp.DEFAULT_SUBMODULE_CAP,
) -> Census:
    """Classify every representation of dimension v over F_p at theta, grouped up to isomorphism."""
    v = tuple(int(x) for x in v)
    params = make_params(theta, None, 0, v)
    buckets: dict = {}
    order = []
    warnings = []
    total = 0
    for m in all_representations(pres, v, p, cap):
        total += 1
        status = classify(m, params, sub_cap)
        key = _bucket_key(m, status)
        classes = buckets.setdefault(key, [])
        for cls in classes:
            try:
                if rp.are_isomorphic(cls[0], m, iso_cap):
                    cls[1] += 1
                    break
            except CapExceeded:
                continue
        else:
            cls = [m, 1, True]
            classes.append(cls)
            order.append(cls)
    # a class whose iso test never certified against some other may be a duplicate
    for key, classes in buckets.items():
        if len(classes) > 1:
            for a, b in itertools.combinations(classes, 2):
                try:
                    rp.are_isomorphic(a[0], b[0], iso_cap)
                except CapExceeded:
                    a[2] = b[2] = False
                    warnings.append(f"isomorphism grouping inconclusive for {a[0]} and {b[0]}")
    entries = tuple(CensusEntry(m, classify(m, params, sub_cap), n, ok) for m, n, ok in order)
    return Census(v, params.theta, p, total, entries, tuple(warnings))


@dataclass(frozen=True)
class WallVerdict:
    wall: Wall
    actual: bool
    points: tuple  # one census point per piece of the wall
    witnesses: tuple  # strictly semistable representatives found by the census

    def to_json(self) -> dict:
        return {
            "wall": self.wall.to_json(),
            "actual": self.actual,
            "basis": "census over a finite field, one point per piece of the wall",
            "points": [[fmt(x) for x in pt] for pt in self.points],
            "witnesses": [r.to_json() for r in self.witnesses],
        }


def actual_walls(
    pres: QuiverPresentation,
    v: Sequence[int],
    walls: Sequence[Wall] | None = None,
    p: int = 2,
    cap: int = DEFAULT_CENSUS_CAP,
) -> list[WallVerdict]:
    """A wall is actual when the census at some interior point has a strictly semistable module.

    One point is taken in every connected piece of the wall minus the other
    walls, since the census is only constant on those pieces.
    """
    v = tuple(int(x) for x in v)
    if walls is None:
        walls = potential_walls(v)
    walls = [w for w in walls if not w.degenerate]
    out = []
    for wall in walls:
        pts = wall_interior_points(v, wall, walls)
        strict = []
        for pt in pts:
            cen = census(pres, v, pt, p, cap)
            strict.extend(e.rep for e in cen.by_status("strictly_semistable"))
        out.append(WallVerdict(wall, bool(strict), tuple(pts), tuple(strict)))
    return out


def plot_segments(v: Sequence[int], walls: Sequence[Wall], radius: int = 1) -> list[tuple]:
    """Line segments of the walls in basis coordinates of a 2-dimensional Theta_v."""
    basis = theta_basis(v)
    if len(basis) != 2:
        raise ValueError("plot data is only produced when Theta_v is 2-dimensional")
    out = []
    for w in walls:
        if w.degenerate:
            continue
        f = [_dot(b, w.w) for b in basis]
        d = (-f[1], f[0])
        scale = max(abs(x) for x in d)
        d = tuple(Fraction(x) / scale * radius for x in d)
        out.append((w.w, -d[0], -d[1], d[0], d[1]))
    return out
