"""Families of representations over the projective line and the number l.C.

A family is given by splitting types ``T_i = O(a_{i,1}) + ... + O(a_{i,v_i})``
and, for each arrow a: i -> j, a ``v_j x v_i`` matrix of homogeneous
polynomials in (s, t) whose (k, l) entry has degree ``a_{j,k} - a_{i,l}``.
Fibers are evaluated at the p + 1 points of P^1(F_p).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg as la
from . import representation as rp
from .errors import ClassMismatch, DegreeError, NotSemistableError, ParseError, RelationError, ShapeError
from .quiver import QuiverPresentation
from .stability import (
    StabilityParams,
    central_charge,
    fmt,
    is_theta_semistable,
    jh_factors,
    same_jh,
)

FINITE_FIELD_NOTE = (
    "finite-field surrogate: fibers sampled at all points of P^1(F_p) stand in for general points over an "
    "algebraically closed field"
)

# A homogeneous polynomial is a frozenset-like tuple of ((deg_s, deg_t), coeff) with coeff in [1, p).
Poly = tuple


def poly_from_dict(d: Mapping, p: int) -> Poly:
    return tuple(sorted(((i, j), c % p) for (i, j), c in d.items() if c % p))


def poly_from_coeffs(coeffs: Sequence[int], p: int) -> Poly:
    """Coefficients of s^d, s^{d-1} t, ..., t^d."""
    d = len(coeffs) - 1
    return poly_from_dict({(d - k, k): int(c) for k, c in enumerate(coeffs)}, p)


_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")
_FACTOR = re.compile(r"^(?:(\d+)|([st])(?:\^(\d+))?)$")


def parse_poly(text: str, p: int) -> Poly:
    """Parse a polynomial such as ``2*s^2*t - t^3`` or ``s+1`` (no homogeneity check here)."""
    text = text.strip()
    if not text:
        raise ParseError("empty polynomial", 1, 1)
    out: dict = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or (m.group(1) is None and not first):
            raise ParseError(f"cannot parse polynomial {text!r}", 1, pos + 1)
        sign = -1 if m.group(1) == "-" else 1
        coef, i, j = 1, 0, 0
        for fac in m.group(2).strip().split("*"):
            f = _FACTOR.match(fac.strip())
            if not f:
                raise ParseError(f"bad factor {fac.strip()!r} in polynomial {text!r}", 1, pos + 1)
            if f.group(1):
                coef *= int(f.group(1))
            elif f.group(2) == "s":
                i += int(f.group(3) or 1)
            else:
                j += int(f.group(3) or 1)
        out[(i, j)] = out.get((i, j), 0) + sign * coef
        pos = m.end()
        first = False
    return poly_from_dict(out, p)


def poly_mul(a: Poly, b: Poly, p: int) -> Poly:
    out: dict = {}
    for (i1, j1), c1 in a:
        for (i2, j2), c2 in b:
            k = (i1 + i2, j1 + j2)
            out[k] = (out.get(k, 0) + c1 * c2) % p
    return poly_from_dict(out, p)


def poly_add(a: Poly, b: Poly, p: int, scale: int = 1) -> Poly:
    out = dict(a)
    for k, c in b:
        out[k] = (out.get(k, 0) + scale * c) % p
    return poly_from_dict(out, p)


def poly_eval(a: Poly, s: int, t: int, p: int) -> int:
    return sum(c * pow(s, i, p) * pow(t, j, p) for (i, j), c in a) % p


def poly_str(a: Poly) -> str:
    if not a:
        return "0"
    parts = []
    for (i, j), c in sorted(a, key=lambda x: (-x[0][0], x[0][1])):
        mono = "*".join(x for x in ((f"s^{i}" if i > 1 else "s") if i else "", (f"t^{j}" if j > 1 else "t") if j else "") if x)
        parts.append(mono if c == 1 and mono else (f"{c}*{mono}" if mono else str(c)))
    return " + ".join(parts)


def _poly_matmul(a, b, p, inner, cols):
    rows = len(a)
    return tuple(
        tuple(_sum_polys((poly_mul(a[r][k], b[k][c], p) for k in range(inner)), p) for c in range(cols)) for r in range(rows)
    )


def _sum_polys(polys, p):
    acc: Poly = ()
    for x in polys:
        acc = poly_add(acc, x, p)
    return acc


@dataclass(frozen=True)
class FamilyOverP1:
    presentation: QuiverPresentation = field(repr=False)
    p: int
    split: tuple  # per vertex, the splitting type (a_{i,1}, ..., a_{i,v_i})
    polys: tuple  # per arrow, a v_target x v_source matrix of Poly
    name: str = ""

    def __post_init__(self):
        q = self.presentation.quiver
        if len(self.split) != len(q.vertices):
            raise ShapeError("one splitting type per vertex required")
        if len(self.polys) != len(q.arrows):
            raise ShapeError("one polynomial matrix per arrow required")
        for a, m in zip(q.arrows, self.polys):
            r = len(self.split[q.vertex_index[a.target]])
            c = len(self.split[q.vertex_index[a.source]])
            if len(m) != r or any(len(row) != c for row in m):
                raise ShapeError(f"arrow {a.name}: polynomial matrix must be {r}x{c}")

    @property
    def v(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.split)

    def twisted(self, c: int) -> "FamilyOverP1":
        """Tensor every T_i with O(c); arrow degrees only see differences so the matrices stay."""
        return FamilyOverP1(
            self.presentation, self.p, tuple(tuple(x + c for x in s) for s in self.split), self.polys, self.name
        )

    def to_json(self) -> dict:
        q = self.presentation.quiver
        return {
            "name": self.name,
            "p": self.p,
            "split": {v: list(s) for v, s in zip(q.vertices, self.split)},
            "polys": {a.name: [[poly_str(x) for x in row] for row in m] for a, m in zip(q.arrows, self.polys)},
        }


def make_family(
    pres: QuiverPresentation, p: int, split: Mapping, polys: Mapping | None = None, name: str = ""
) -> FamilyOverP1:
    """``split`` maps vertices to twists; ``polys`` maps arrows to {(row, col): entry} (0-based).

    An entry is a coefficient list (s^d ... t^d), a polynomial string or a
    monomial dict.  Missing entries are zero.
    """
    la.check_prime(p)
    q = pres.quiver
    unknown = set(split) - set(q.vertex_index)
    if unknown:
        raise ShapeError(f"splitting types for unknown vertices {sorted(unknown)}")
    sp = tuple(tuple(int(x) for x in split.get(v, ())) for v in q.vertices)
    polys = dict(polys or {})
    unknown = set(polys) - set(q.arrow_index)
    if unknown:
        raise ShapeError(f"polynomials for unknown arrows {sorted(unknown)}")
    mats = []
    for a in q.arrows:
        r, c = len(sp[q.vertex_index[a.target]]), len(sp[q.vertex_index[a.source]])
        m = [[() for _ in range(c)] for _ in range(r)]
        for (row, col), entry in polys.get(a.name, {}).items():
            if not (0 <= row < r and 0 <= col < c):
                raise ShapeError(f"arrow {a.name}: entry ({row + 1},{col + 1}) outside a {r}x{c} matrix")
            if isinstance(entry, str):
                m[row][col] = parse_poly(entry, p)
            elif isinstance(entry, Mapping):
                m[row][col] = poly_from_dict(entry, p)
            else:
                m[row][col] = poly_from_coeffs(entry, p)
        mats.append(tuple(tuple(row) for row in m))
    return FamilyOverP1(pres, p, sp, tuple(mats), name)


def _path_poly(fam: FamilyOverP1, path) -> tuple:
    q = fam.presentation.quiver
    d = len(fam.split[q.vertex_index[path.source]])
    one = (((0, 0), 1),)
    cur = tuple(tuple(one if r == c else () for c in range(d)) for r in range(d))
    for name in path.arrows:
        a = q.arrow(name)
        m = fam.polys[q.arrow_index[name]]
        cur = _poly_matmul(m, cur, fam.p, len(fam.split[q.vertex_index[a.source]]), d)
    return cur


def check_structure(fam: FamilyOverP1) -> FamilyOverP1:
    """Degree pattern and polynomial relation identities."""
    if fam.__dict__.get("_structure_ok"):
        return fam
    q = fam.presentation.quiver
    p = fam.p
    for a, m in zip(q.arrows, fam.polys):
        src = fam.split[q.vertex_index[a.source]]
        tgt = fam.split[q.vertex_index[a.target]]
        for k, row in enumerate(m):
            for l, entry in enumerate(row):
                if not entry:
                    continue
                want = tgt[k] - src[l]
                degs = {i + j for (i, j), _ in entry}
                if len(degs) > 1:
                    raise DegreeError(f"arrow {a.name} entry ({k + 1},{l + 1}): {poly_str(entry)} is not homogeneous")
                got = degs.pop()
                if want < 0:
                    raise DegreeError(
                        f"arrow {a.name} entry ({k + 1},{l + 1}) must be zero (degree {want} < 0), got {poly_str(entry)}"
                    )
                if got != want:
                    raise DegreeError(
                        f"arrow {a.name} entry ({k + 1},{l + 1}): expected degree {want}, got {poly_str(entry)} of degree {got}"
                    )
    for idx, rel in enumerate(fam.presentation.relations):
        rows = len(fam.split[q.vertex_index[rel.target]])
        cols = len(fam.split[q.vertex_index[rel.source]])
        acc = [[() for _ in range(cols)] for _ in range(rows)]
        for c, pth in rel.terms:
            coef = la.to_field(c, p)
            pm = _path_poly(fam, pth)
            for r in range(rows):
                for col in range(cols):
                    acc[r][col] = poly_add(acc[r][col], pm[r][col], p, coef)
        for r in range(rows):
            for col in range(cols):
                if acc[r][col]:
                    (i, j), cf = acc[r][col][0]
                    raise RelationError(
                        f"relation {idx} ({rel}) fails at entry ({r + 1},{col + 1}): "
                        f"monomial s^{i} t^{j} has coefficient {cf}",
                        idx,
                        tuple(tuple(poly_str(x) for x in row) for row in acc),
                    )
    object.__setattr__(fam, "_structure_ok", True)
    return fam


def points_p1(p: int) -> list[tuple[int, int]]:
    """[1:t] for t in F_p, then [0:1]."""
    return [tuple(x) for x in la.projective_points(2, p)]


def fiber_at(fam: FamilyOverP1, point: Sequence[int]) -> rp.Representation:
    check_structure(fam)
    s, t = (int(x) % fam.p for x in point)
    if s == 0 and t == 0:
        raise ValueError("[0:0] is not a point of P^1")
    mats = {
        a.name: [[poly_eval(x, s, t, fam.p) for x in row] for row in m]
        for a, m in zip(fam.presentation.quiver.arrows, fam.polys)
    }
    return rp.make_representation(fam.presentation, fam.p, fam.v, mats)


def check_family(fam: FamilyOverP1, params: StabilityParams | None = None, cap: int = rp.DEFAULT_SUBMODULE_CAP):
    """Structure checks plus theta-semistability of the fiber at every F_p-point."""
    check_structure(fam)
    if params is not None:
        _require_class(fam, params)
        for pt in points_p1(fam.p):
            if not is_theta_semistable(fiber_at(fam, pt), params, cap):
                raise NotSemistableError(f"fiber at [{pt[0]}:{pt[1]}] is not theta-semistable")
    return fam


def det_degrees(fam: FamilyOverP1) -> tuple[int, ...]:
    return tuple(sum(s) for s in fam.split)


@dataclass(frozen=True)
class NefNumber:
    value: Fraction
    c: Fraction  # c_{lambda,xi} = 1 / ((xi^2 + 1) lambda(v))

    def to_json(self) -> dict:
        return {"value": fmt(self.value), "c": fmt(self.c)}


def _require_class(fam: FamilyOverP1, params: StabilityParams) -> None:
    if fam.v != params.v:
        raise ClassMismatch(f"family has class {fam.v}, parameters are for v = {params.v}")


def c_lambda_xi(params: StabilityParams) -> Fraction:
    lam_v = sum((x * y for x, y in zip(params.lam, params.v)), Fraction(0))
    return 1 / ((params.xi * params.xi + 1) * lam_v)


def ell_dot_C_determinant(fam: FamilyOverP1, params: StabilityParams) -> NefNumber:
    """``c_{lambda,xi} * sum_i theta_i deg det T_i``."""
    _require_class(fam, params)
    c = c_lambda_xi(params)
    return NefNumber(c * sum((t * d for t, d in zip(params.theta, det_degrees(fam))), Fraction(0)), c)


def knum_class(fam: FamilyOverP1) -> tuple[int, ...]:
    """u_i = rank + degree of T_i, the Euler characteristic on a genus-0 curve."""
    return tuple(v + d for v, d in zip(fam.v, det_degrees(fam)))


def ell_dot_C_charge(fam: FamilyOverP1, params: StabilityParams) -> NefNumber:
    """``Im(Z(u) / -Z(v))`` computed as exact rational complex division."""
    _require_class(fam, params)
    zu = central_charge(params, knum_class(fam))
    zv = central_charge(params, fam.v)
    if zv.is_zero():
        raise ZeroDivisionError("Z(v) vanishes")
    # (a + bi) / (c + di) with c + di = -Z(v)
    a, b = zu.re, zu.im
    c, d = -zv.re, -zv.im
    den = c * c + d * d
    im = (b * c - a * d) / den
    return NefNumber(im, c_lambda_xi(params))


@dataclass(frozen=True)
class PositivityReport:
    ell_determinant: Fraction
    ell_charge: Fraction
    c: Fraction
    points: tuple
    jh: tuple  # JHMultiset per point
    s_classes: tuple  # tuples of point indices, one per S-equivalence class
    verdict: str  # confirmed_positive | confirmed_zero | flagged
    routes_agree: bool
    nef: bool

    @property
    def all_s_equivalent(self) -> bool:
        return len(self.s_classes) <= 1

    @property
    def pairwise_distinct(self) -> bool:
        return len(self.s_classes) == len(self.points)

    def to_json(self) -> dict:
        return {
            "ell_determinant": fmt(self.ell_determinant),
            "ell_charge": fmt(self.ell_charge),
            "c_lambda_xi": fmt(self.c),
            "routes_agree": self.routes_agree,
            "nef": self.nef,
            "all_fibers_s_equivalent": self.all_s_equivalent,
            "fibers_pairwise_non_s_equivalent": self.pairwise_distinct,
            "s_classes": [list(c) for c in self.s_classes],
            "fibers": [
                {"point": f"[{s}:{t}]", "jh": jh.to_json()} for (s, t), jh in zip(self.points, self.jh)
            ],
            "dichotomy": self.verdict,
            "note": FINITE_FIELD_NOTE,
        }


def positivity_report(
    fam: FamilyOverP1,
    params: StabilityParams,
    cap: int = rp.DEFAULT_SUBMODULE_CAP,
    iso_cap: int = rp.DEFAULT_ISO_CAP,
) -> PositivityReport:
    """Both l.C routes, fiberwise JH data and the dichotomy verdict.

    The verdict is ``confirmed_positive`` when l.C > 0 and some fibers are not
    S-equivalent, ``confirmed_zero`` when l.C = 0 and all are, and
    ``flagged`` otherwise (including l.C < 0).
    """
    check_family(fam, params, cap)
    det = ell_dot_C_determinant(fam, params)
    chg = ell_dot_C_charge(fam, params)
    pts = points_p1(fam.p)
    jhs = [jh_factors(fiber_at(fam, pt), params, cap, iso_cap) for pt in pts]
    classes: list[list[int]] = []
    for k, jh in enumerate(jhs):
        for cls in classes:
            if same_jh(jhs[cls[0]], jh, iso_cap):
                cls.append(k)
                break
        else:
            classes.append([k])
    ell = det.value
    all_eq = len(classes) <= 1
    if ell > 0 and not all_eq:
        verdict = "confirmed_positive"
    elif ell == 0 and all_eq:
        verdict = "confirmed_zero"
    else:
        verdict = "flagged"
    return PositivityReport(
        ell,
        chg.value,
        det.c,
        tuple(pts),
        tuple(jhs),
        tuple(tuple(c) for c in classes),
        verdict,
        det.value == chg.value,
        ell >= 0,
    )
