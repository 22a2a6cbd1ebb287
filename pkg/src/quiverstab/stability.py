"""Central charges, King and Bridgeland-type stability, HN and JH filtrations.

For parameters (theta, lambda, xi) the central charge of a class d is

    Z(d) = theta(d) + (i + xi) * lambda(d),

so ``Re Z = theta(d) + xi*lambda(d)`` and ``Im Z = lambda(d)``.  Phases live
in (0, 1] and are compared exactly by cross-multiplication; nothing here uses
floating point except the ``phase_float`` convenience.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, cmp_to_key
from typing import Sequence

from . import representation as rp
from .errors import ClassMismatch, DimensionMismatch, InvariantViolation, NotSemistableError, ParamsError

LESS, EQUAL, GREATER = -1, 0, 1


def _lcm(xs) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out


@dataclass(frozen=True)
class ChargeValue:
    re: Fraction
    im: Fraction

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def to_json(self) -> dict:
        return {"re": fmt(self.re), "im": fmt(self.im)}


def fmt(x) -> str:
    """Exact rational as ``"p/q"`` (or ``"p"`` for integers)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class StabilityParams:
    """(theta, lambda, xi) for the fixed class v, all exact rationals.

    Construction checks ``lambda_i > 0`` and ``theta(v) = 0``.
    """

    theta: tuple
    lam: tuple
    xi: Fraction
    v: tuple

    def __post_init__(self):
        theta = tuple(Fraction(t) for t in self.theta)
        lam = tuple(Fraction(x) for x in self.lam)
        v = tuple(int(x) for x in self.v)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "xi", Fraction(self.xi))
        object.__setattr__(self, "v", v)
        if not (len(theta) == len(lam) == len(v)):
            raise DimensionMismatch(f"theta, lambda and v have lengths {len(theta)}, {len(lam)}, {len(v)}")
        if any(x <= 0 for x in lam):
            raise ParamsError(f"lambda must be positive at every vertex, got {[fmt(x) for x in lam]}")
        if any(x < 0 for x in v):
            raise ParamsError("v must be a nonnegative dimension vector")
        if sum(t * x for t, x in zip(theta, v)) != 0:
            raise ParamsError(f"theta(v) = {fmt(sum(t * x for t, x in zip(theta, v)))} but must vanish")
        # integer charges: Z(d) * b * D = (R.d, I.d) with D clearing theta/lambda and xi = a/b
        d = _lcm(x.denominator for x in theta + lam)
        a, b = self.xi.numerator, self.xi.denominator
        big_t = [int(t * d) for t in theta]
        big_l = [int(x * d) for x in lam]
        object.__setattr__(self, "_re", tuple(b * t + a * x for t, x in zip(big_t, big_l)))
        object.__setattr__(self, "_im", tuple(b * x for x in big_l))
        object.__setattr__(self, "_theta_int", tuple(big_t))

    @property
    def n(self) -> int:
        return len(self.v)

    def int_charge(self, d: Sequence[int]) -> tuple[int, int]:
        """A positive multiple of Z(d) with integer coordinates; same phase as Z(d)."""
        return (sum(r * x for r, x in zip(self._re, d)), sum(i * x for i, x in zip(self._im, d)))

    def theta_sign(self, d: Sequence[int]) -> int:
        s = sum(t * x for t, x in zip(self._theta_int, d))
        return (s > 0) - (s < 0)

    def scaled(self, c) -> "StabilityParams":
        c = Fraction(c)
        return StabilityParams(tuple(c * t for t in self.theta), tuple(c * x for x in self.lam), self.xi, self.v)

    def to_json(self) -> dict:
        return {
            "theta": [fmt(t) for t in self.theta],
            "lambda": [fmt(x) for x in self.lam],
            "xi": fmt(self.xi),
            "v": list(self.v),
        }


def make_params(theta, lam=None, xi=0, v=None) -> StabilityParams:
    """Convenience constructor; lambda defaults to all ones and v must be given."""
    if v is None:
        raise ParamsError("the class v is required")
    if lam is None:
        lam = (1,) * len(theta)
    return StabilityParams(tuple(theta), tuple(lam), Fraction(xi), tuple(v))


def theta_of(params: StabilityParams, d: Sequence[int]) -> Fraction:
    if len(d) != params.n:
        raise DimensionMismatch(f"class of length {len(d)} for {params.n} vertices")
    return sum((t * x for t, x in zip(params.theta, d)), Fraction(0))


def central_charge(params: StabilityParams, d: Sequence[int]) -> ChargeValue:
    if len(d) != params.n:
        raise DimensionMismatch(f"class of length {len(d)} for {params.n} vertices")
    lam = sum((x * y for x, y in zip(params.lam, d)), Fraction(0))
    return ChargeValue(theta_of(params, d) + params.xi * lam, lam)


def _check_charge(re, im) -> None:
    if im < 0 or (im == 0 and re >= 0):
        raise ValueError(f"charge ({re}, {im}) is zero or outside the upper half-plane")


def phase_compare(z1, z2) -> int:
    """-1, 0, 1 as phase(z1) is less than, equal to or greater than phase(z2).

    Accepts :class:`ChargeValue` or ``(re, im)`` pairs.  The negative real
    axis has phase 1.
    """
    re1, im1 = (z1.re, z1.im) if isinstance(z1, ChargeValue) else z1
    re2, im2 = (z2.re, z2.im) if isinstance(z2, ChargeValue) else z2
    _check_charge(re1, im1)
    _check_charge(re2, im2)
    s = re2 * im1 - re1 * im2
    return (s > 0) - (s < 0)


def phase_float(z) -> float:
    """Approximate phase in (0, 1], for display only."""
    re, im = (z.re, z.im) if isinstance(z, ChargeValue) else z
    return math.atan2(float(im), float(re)) / math.pi


def _cmp_int(params: StabilityParams, d1, d2) -> int:
    r1, i1 = params.int_charge(d1)
    r2, i2 = params.int_charge(d2)
    s = r2 * i1 - r1 * i2
    return (s > 0) - (s < 0)


def support_constant(params: StabilityParams) -> Fraction:
    return min(params.lam)


def support_holds(params: StabilityParams, d: Sequence[int]) -> bool:
    """``|Z(d)|^2 >= C^2 * ||d||_inf^2``, exactly."""
    c = support_constant(params)
    return central_charge(params, d).abs2() >= c * c * max(abs(x) for x in d) ** 2


# ------------------------------------------------------------ decisions


def _require_class(m: rp.Representation, params: StabilityParams) -> None:
    if m.dims != params.v:
        raise ClassMismatch(f"module has dimension vector {m.dims}, parameters are for v = {params.v}")


def is_theta_semistable(m: rp.Representation, params: StabilityParams, cap: int = rp.DEFAULT_SUBMODULE_CAP) -> bool:
    """King: theta(N) >= 0 for every nonzero proper submodule N."""
    _require_class(m, params)
    return all(params.theta_sign(d) >= 0 for d in rp.submodule_dim_vectors(m, cap))


def is_theta_stable(m: rp.Representation, params: StabilityParams, cap: int = rp.DEFAULT_SUBMODULE_CAP) -> bool:
    """King: theta(N) > 0 for every nonzero proper submodule N (and m nonzero)."""
    _require_class(m, params)
    if m.total_dim == 0:
        return False
    zero = (0,) * len(m.dims)
    return all(params.theta_sign(d) > 0 for d in rp.submodule_dim_vectors(m, cap) if d not in (zero, m.dims))


def _require_nonzero(m: rp.Representation) -> None:
    if m.total_dim == 0:
        raise ValueError("the zero module has no phase")


def is_sigma_semistable(m: rp.Representation, params: StabilityParams, cap: int = rp.DEFAULT_SUBMODULE_CAP) -> bool:
    """No nonzero submodule has strictly larger phase than m."""
    _require_nonzero(m)
    zero = (0,) * len(m.dims)
    return all(_cmp_int(params, d, m.dims) <= 0 for d in rp.submodule_dim_vectors(m, cap) if d != zero)


def is_sigma_stable(m: rp.Representation, params: StabilityParams, cap: int = rp.DEFAULT_SUBMODULE_CAP) -> bool:
    _require_nonzero(m)
    zero = (0,) * len(m.dims)
    return all(_cmp_int(params, d, m.dims) < 0 for d in rp.submodule_dim_vectors(m, cap) if d not in (zero, m.dims))


def classify(m: rp.Representation, params: StabilityParams, cap: int = rp.DEFAULT_SUBMODULE_CAP) -> str:
    """'stable', 'strictly_semistable' or 'unstable' in the King sense."""
    if not is_theta_semistable(m, params, cap):
        return "unstable"
    return "stable" if is_theta_stable(m, params, cap) else "strictly_semistable"


# ----------------------------------------------------------------- HN


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


@dataclass(frozen=True)
class HNFiltration:
    module: rp.Representation = field(repr=False, compare=False)
    chain: tuple  # Submodules 0 = M_0 < M_1 < ... < M_k = M
    charges: tuple  # ChargeValues of the factors

    @cached_property
    def factors(self) -> tuple:
        """Representations M_k / M_{k-1}, built on first use."""
        return tuple(rp.subquotient(self.module, a, b) for a, b in zip(self.chain, self.chain[1:]))

    @property
    def factor_dims(self) -> tuple:
        return tuple(_sub(b.dims, a.dims) for a, b in zip(self.chain, self.chain[1:]))

    def to_json(self) -> dict:
        return {
            "length": len(self.factors),
            "chain_dims": [list(s.dims) for s in self.chain],
            "factors": [
                {"dim": list(f.dims), "charge": z.to_json(), "phase_approx": round(phase_float(z), 12), "rep": f.to_json()}
                for f, z in zip(self.factors, self.charges)
            ],
        }


def _lattice(m, cap, shuffle_seed):
    lat = rp.all_submodules(m, cap)
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(lat)
    return lat


def _hn_rank(params, base, x, y) -> int:
    """Order on dimension vectors above ``base``: larger quotient phase first, then larger dimension."""
    c = _cmp_int(params, _sub(y, base), _sub(x, base))
    if c:
        return c
    return sum(y) - sum(x)


def hn_filtration(
    m: rp.Representation,
    params: StabilityParams,
    cap: int = rp.DEFAULT_SUBMODULE_CAP,
    shuffle_seed: int | None = None,
) -> HNFiltration:
    """Greedy maximal-destabilizer recursion, carried out inside m's own lattice.

    Step k picks, among submodules N strictly containing M_{k-1}, the one
    whose quotient N / M_{k-1} has maximal phase, then maximal total
    dimension.  ``shuffle_seed`` permutes the candidate order; the result must
    not depend on it.
    """
    _require_nonzero(m)
    lat = _lattice(m, cap, shuffle_seed)
    by_dims: dict = {}
    for n in lat:
        by_dims.setdefault(n.dims, []).append(n)
    lower = rp.zero_submodule(m)
    chain = [lower]
    charges = []
    top = m.dims
    while lower.dims != top:
        # phases only depend on dimension vectors: rank those first, then
        # look for submodules above ``lower`` in the best-ranked class
        cands = [d for d in by_dims if d != lower.dims and all(a >= b for a, b in zip(d, lower.dims))]
        cands.sort(key=cmp_to_key(lambda x, y: _hn_rank(params, lower.dims, x, y)))
        best, ties = None, []
        k = 0
        while best is None:
            cls = [cands[k]]
            k += 1
            while k < len(cands) and _hn_rank(params, lower.dims, cls[0], cands[k]) == 0:
                cls.append(cands[k])
                k += 1
            above = [n for d in cls for n in by_dims[d] if lower <= n]
            if above:
                best, ties = above[0], above[1:]
        if ties:
            raise InvariantViolation(
                "maximal destabilizing submodule is not unique",
                witnesses=[best.spaces] + [t.spaces for t in ties],
            )
        charges.append(central_charge(params, _sub(best.dims, lower.dims)))
        chain.append(best)
        lower = best
    return HNFiltration(m, tuple(chain), tuple(charges))


# ----------------------------------------------------------------- JH


@dataclass(frozen=True)
class JHMultiset:
    """Isomorphism classes of stable factors with multiplicities, in canonical order."""

    classes: tuple  # ((Representation, multiplicity), ...)

    @property
    def total_dims(self) -> tuple:
        if not self.classes:
            return ()
        n = len(self.classes[0][0].dims)
        return tuple(sum(r.dims[i] * k for r, k in self.classes) for i in range(n))

    @property
    def size(self) -> int:
        return sum(k for _, k in self.classes)

    def to_json(self) -> dict:
        return {"factors": [{"multiplicity": k, "dim": list(r.dims), "rep": r.to_json()} for r, k in self.classes]}


def _canon_key(r: rp.Representation):
    return (r.dims, r.mats)


def group_iso_classes(reps, cap: int = rp.DEFAULT_ISO_CAP) -> list[list]:
    """Partition ``reps`` into isomorphism classes (input order preserved within classes)."""
    classes: list[list] = []
    for r in reps:
        for cls in classes:
            if cls[0].dims == r.dims and rp.are_isomorphic(cls[0], r, cap):
                cls.append(r)
                break
        else:
            classes.append([r])
    return classes


def jh_chain(m, params, cap=rp.DEFAULT_SUBMODULE_CAP, shuffle_seed=None) -> list[rp.Representation]:
    """Stable factors of one JH filtration of a semistable m (non-canonical order)."""
    lat = rp.all_submodules(m, cap)
    if shuffle_seed is not None:
        lat = list(lat)
        random.Random(shuffle_seed).shuffle(lat)
        lat.sort(key=lambda s: s.total_dim)
    lower = rp.zero_submodule(m)
    out = []
    while lower.dims != m.dims:
        pick = None
        for n in lat:
            if n.total_dim > lower.total_dim and lower <= n and _cmp_int(params, _sub(n.dims, lower.dims), m.dims) == 0:
                pick = n
                break
        if pick is None:
            raise InvariantViolation("no equal-phase submodule above a JH step; input not semistable?")
        out.append(rp.subquotient(m, lower, pick))
        lower = pick
    return out


def jh_factors(
    m: rp.Representation,
    params: StabilityParams,
    cap: int = rp.DEFAULT_SUBMODULE_CAP,
    iso_cap: int = rp.DEFAULT_ISO_CAP,
    shuffle_seed: int | None = None,
) -> JHMultiset:
    """JH factors of a sigma-semistable module as an isomorphism-class multiset.

    Each step takes a minimal-dimension submodule of the remaining quotient
    with the same phase as m; such a submodule is automatically stable.
    """
    _require_nonzero(m)
    if not is_sigma_semistable(m, params, cap):
        raise NotSemistableError(f"{m} is not semistable for {params.to_json()}")
    key = ("jh", params, shuffle_seed)
    cache = m.__dict__.setdefault("_lattice_cache", {})
    if key in cache:
        return cache[key]
    factors = jh_chain(m, params, cap, shuffle_seed)
    classes = group_iso_classes(factors, iso_cap)
    out = []
    for cls in classes:
        rep = min(cls, key=_canon_key)
        out.append((rep, len(cls)))
    out.sort(key=lambda rk: _canon_key(rk[0]))
    res = JHMultiset(tuple(out))
    cache[key] = res
    return res


def same_jh(a: JHMultiset, b: JHMultiset, iso_cap: int = rp.DEFAULT_ISO_CAP) -> bool:
    if a.size != b.size or a.total_dims != b.total_dims or len(a.classes) != len(b.classes):
        return False
    used = set()
    for r, k in a.classes:
        for idx, (s, l) in enumerate(b.classes):
            if idx in used or k != l or r.dims != s.dims:
                continue
            if rp.are_isomorphic(r, s, iso_cap):
                used.add(idx)
                break
        else:
            return False
    return True


def s_equivalent(
    m: rp.Representation,
    n: rp.Representation,
    params: StabilityParams,
    cap: int = rp.DEFAULT_SUBMODULE_CAP,
    iso_cap: int = rp.DEFAULT_ISO_CAP,
) -> bool:
    """Equal JH multisets up to isomorphism.  Both inputs must be semistable."""
    return same_jh(jh_factors(m, params, cap, iso_cap), jh_factors(n, params, cap, iso_cap), iso_cap)


# ------------------------------------------------------------ genericity


def is_generic(params: StabilityParams) -> tuple[bool, list[tuple[int, ...]]]:
    """Sufficient check: theta(w) != 0 for every potential wall vector w.

    Conservative: a failing w might never be realized by a submodule, so a
    ``False`` answer does not prove that strictly semistable modules exist.
    """
    from .walls import potential_walls

    bad = [w.w for w in potential_walls(params.v, include_degenerate=True) if params.theta_sign(w.w) == 0]
    return (not bad, bad)


def random_theta(v: Sequence[int], rng: random.Random, bound: int = 3) -> tuple:
    """A random integer point of Theta_v (projection of a random vector, made primitive)."""
    n = len(v)
    raw = [rng.randint(-bound, bound) for _ in range(n)]
    vv = sum(x * x for x in v)
    if vv == 0:
        return tuple(Fraction(x) for x in raw)
    tv = sum(a * b for a, b in zip(raw, v))
    proj = [vv * a - tv * b for a, b in zip(raw, v)]
    g = 0
    for x in proj:
        g = math.gcd(g, x)
    return tuple(Fraction(x // g) if g else Fraction(0) for x in proj)


def random_params(v: Sequence[int], rng: random.Random, bound: int = 3) -> StabilityParams:
    """Seeded draw of (theta, lambda, xi) with theta in Theta_v and lambda > 0."""
    theta = random_theta(v, rng, bound)
    lam = tuple(Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in v)
    xi = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return StabilityParams(theta, lam, xi, tuple(v))
