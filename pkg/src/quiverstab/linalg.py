"""Exact linear algebra over prime fields F_p and over the rationals.

Vectors are tuples, matrices are tuples of row tuples.  Over F_p entries are
plain ints in ``[0, p)``; passing ``p=None`` switches every routine to
:class:`fractions.Fraction` arithmetic.  Subspaces are stored in reduced row
echelon form, which is canonical, so ``==`` and ``hash`` on :class:`Subspace`
decide equality of subspaces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CapExceeded, DimensionMismatch

MAX_PRIME = 2**31

Vector = tuple
Matrix = tuple


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p) or p > MAX_PRIME:
        raise ValueError(f"modulus must be a prime <= 2^31, got {p!r}")
    return p


@dataclass(frozen=True)
class FpElement:
    """An element of F_p.  Arithmetic between elements of different fields raises."""

    residue: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        if not 0 <= self.residue < self.p:
            object.__setattr__(self, "residue", self.residue % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ValueError("elements of different prime fields")
            return other.residue
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement((self.residue + o) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement((self.residue - o) % self.p, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement((o - self.residue) % self.p, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.residue * o % self.p, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement(-self.residue % self.p, self.p)

    def inverse(self) -> "FpElement":
        if self.residue == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return FpElement(pow(self.residue, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * FpElement(o, self.p).inverse()

    def __int__(self):
        return self.residue


def to_field(x, p: int | None):
    """Coerce an int/Fraction/FpElement into the scalar type used for modulus ``p``."""
    if p is None:
        return Fraction(x)
    if isinstance(x, FpElement):
        return x.residue % p
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise ZeroDivisionError(f"denominator of {x} vanishes mod {p}")
        return x.numerator * pow(x.denominator, -1, p) % p
    return int(x) % p


def as_matrix(rows, p: int | None, ncols: int | None = None) -> Matrix:
    m = tuple(tuple(to_field(x, p) for x in row) for row in rows)
    if m and len({len(r) for r in m}) != 1:
        raise DimensionMismatch("ragged matrix")
    if ncols is not None and m and len(m[0]) != ncols:
        raise DimensionMismatch(f"expected {ncols} columns, got {len(m[0])}")
    return m


def zero_matrix(rows: int, cols: int) -> Matrix:
    return tuple((0,) * cols for _ in range(rows))


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def matmul(a: Matrix, b: Matrix, p: int | None, cols: int | None = None) -> Matrix:
    """Product of an r x n and an n x c matrix.  Pass ``cols`` when n may be 0."""
    cols = len(b[0]) if b else (cols or 0)
    bt = list(zip(*b)) if b else [()] * cols
    if p is None:
        return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) % p for col in bt) for row in a)


def matvec(a: Matrix, v: Vector, p: int | None) -> Vector:
    if p is None:
        return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)
    return tuple(sum(x * y for x, y in zip(row, v)) % p for row in a)


def mat_add(a: Matrix, b: Matrix, p: int | None, scale=1) -> Matrix:
    if p is None:
        return tuple(tuple(x + scale * y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
    return tuple(tuple((x + scale * y) % p for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def transpose(a: Matrix, nrows_if_empty: int = 0) -> Matrix:
    return tuple(zip(*a)) if a else tuple(() for _ in range(nrows_if_empty))


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def _rref_rows(rows: list[list], ncols: int, p: int | None) -> tuple[list[list], list[int]]:
    """In-place Gauss-Jordan; returns (rows, pivot columns)."""
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        if p is None:
            inv = 1 / Fraction(lead)
            rows[r] = [x * inv for x in rows[r]]
        else:
            inv = pow(lead, -1, p)
            rows[r] = [x * inv % p for x in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                if p is None:
                    rows[i] = [x - f * y for x, y in zip(rows[i], prow)]
                else:
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: Matrix, p: int | None, ncols: int | None = None) -> tuple[Matrix, int]:
    """Reduced row echelon form (same shape as ``m``) and rank."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    rows = [[to_field(x, p) for x in row] for row in m]
    rows, pivots = _rref_rows(rows, ncols, p)
    return tuple(tuple(r) for r in rows), len(pivots)


def rank(m: Matrix, p: int | None, ncols: int | None = None) -> int:
    return rref(m, p, ncols)[1]


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``F^ambient`` with its canonical RREF basis."""

    ambient: int
    basis: tuple
    p: int | None

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient: int, p: int | None) -> "Subspace":
        rows = [[to_field(x, p) for x in v] for v in vectors]
        for r in rows:
            if len(r) != ambient:
                raise DimensionMismatch(f"vector of length {len(r)} in ambient dimension {ambient}")
        rows, pivots = _rref_rows(rows, ambient, p)
        return cls(ambient, tuple(tuple(r) for r in rows[: len(pivots)]), p)

    @classmethod
    def _span_trusted(cls, rows, ambient: int, p: int | None) -> "Subspace":
        """``span`` for rows already in field form and of the right length."""
        rows, pivots = _rref_rows([list(r) for r in rows], ambient, p)
        return cls(ambient, tuple(tuple(r) for r in rows[: len(pivots)]), p)

    @classmethod
    def zero(cls, ambient: int, p: int | None) -> "Subspace":
        return cls(ambient, (), p)

    @classmethod
    def full(cls, ambient: int, p: int | None) -> "Subspace":
        return cls(ambient, identity(ambient), p)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(row) if x != 0) for row in self.basis)

    def reduce(self, v: Sequence) -> tuple:
        """Residue of ``v`` after eliminating this subspace's pivot coordinates."""
        w = list(v)
        p = self.p
        for row, c in zip(self.basis, self.pivots):
            f = w[c]
            if f:
                if p is None:
                    w = [x - f * y for x, y in zip(w, row)]
                else:
                    w = [(x - f * y) % p for x, y in zip(w, row)]
        return tuple(w)

    def coordinates(self, v: Sequence) -> tuple:
        """Coordinates of ``v`` (assumed to lie in the subspace) in the RREF basis."""
        return tuple(v[c] for c in self.pivots)

    def __contains__(self, v) -> bool:
        return contains(self, v)

    def __le__(self, other: "Subspace") -> bool:
        _same_ambient(self, other)
        return all(contains(other, v) for v in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)


def _same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient != b.ambient or a.p != b.p:
        raise DimensionMismatch(
            f"subspaces live in different spaces (dim {a.ambient} vs {b.ambient}, p={a.p} vs {b.p})"
        )


def contains(a: Subspace, v: Sequence) -> bool:
    if len(v) != a.ambient:
        raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {a.ambient}")
    return not any(a.reduce(to_field_vec(v, a.p)))


def to_field_vec(v: Sequence, p: int | None) -> tuple:
    return tuple(to_field(x, p) for x in v)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    if not b.basis:
        return a
    if not a.basis:
        return b
    if len(a.basis) == a.ambient:
        return a
    extra = [v for v in b.basis if any(a.reduce(v))]
    if not extra:
        return a
    return Subspace._span_trusted(a.basis + tuple(extra), a.ambient, a.p)


def add_vectors(a: Subspace, vectors: Iterable[Sequence]) -> Subspace:
    """``a + span(vectors)``, skipping the elimination when nothing new is added."""
    extra = [v for v in vectors if any(a.reduce(v))]
    if not extra:
        return a
    return Subspace._span_trusted(a.basis + tuple(tuple(v) for v in extra), a.ambient, a.p)


def kernel(m: Matrix, p: int | None, ncols: int | None = None) -> Subspace:
    """Right null space of ``m``."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    rows = [[to_field(x, p) for x in row] for row in m]
    rows, pivots = _rref_rows(rows, ncols, p)
    one = Fraction(1) if p is None else 1
    free = [c for c in range(ncols) if c not in set(pivots)]
    vecs = []
    for f in free:
        v = [0 * one] * ncols
        v[f] = one
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f] if p is None else (-rows[r][f]) % p
        vecs.append(v)
    return Subspace.span(vecs, ncols, p)


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the kernel of ``[A^T | -B^T]``."""
    _same_ambient(a, b)
    if not a.basis or not b.basis:
        return Subspace.zero(a.ambient, a.p)
    p = a.p
    neg = (lambda x: -x) if p is None else (lambda x: (-x) % p)
    # columns: coefficients of a's basis then of b's basis
    system = tuple(
        tuple(row[k] for row in a.basis) + tuple(neg(row[k]) for row in b.basis) for k in range(a.ambient)
    )
    ker = kernel(system, p, a.dim + b.dim)
    vecs = []
    for coeffs in ker.basis:
        ca = coeffs[: a.dim]
        v = [0] * a.ambient
        for c, row in zip(ca, a.basis):
            if c:
                v = [x + c * y for x, y in zip(v, row)]
        vecs.append(v if p is None else [x % p for x in v])
    return Subspace.span(vecs, a.ambient, p)


def image(m: Matrix, sub: Subspace, target_dim: int) -> Subspace:
    """``m`` applied to ``sub``; ``m`` has shape target_dim x sub.ambient."""
    return Subspace.span((matvec(m, v, sub.p) for v in sub.basis), target_dim, sub.p)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def count_subspaces(d: int, p: int) -> int:
    return sum(gaussian_binomial(d, k, p) for k in range(d + 1))


def enumerate_all_subspaces(ambient_dim: int, p: int, cap: int = 100_000) -> list[Subspace]:
    """Every subspace of F_p^d exactly once, built directly as RREF matrices.

    Ordered by dimension, then pivot set, then free entries.
    """
    check_prime(p)
    total = count_subspaces(ambient_dim, p)
    if total > cap:
        raise CapExceeded(f"F_{p}^{ambient_dim} has {total} subspaces, cap is {cap}", partial=0)
    out = []
    d = ambient_dim
    for k in range(d + 1):
        for pivots in itertools.combinations(range(d), k):
            pivset = set(pivots)
            # free positions: (row r, column c) with c > pivots[r] and c not a pivot
            free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, d) if c not in pivset]
            for values in itertools.product(range(p), repeat=len(free)):
                rows = [[0] * d for _ in range(k)]
                for r, pc in enumerate(pivots):
                    rows[r][pc] = 1
                for (r, c), x in zip(free, values):
                    rows[r][c] = x
                out.append(Subspace(d, tuple(tuple(r) for r in rows), p))
    return out


def projective_points(d: int, p: int) -> list[tuple]:
    """One nonzero vector per line of F_p^d (first nonzero entry equal to 1)."""
    pts = []
    for lead in range(d):
        for tail in itertools.product(range(p), repeat=d - lead - 1):
            pts.append((0,) * lead + (1,) + tail)
    return pts


def is_invertible(m: Matrix, p: int | None) -> bool:
    n = len(m)
    if n == 0:
        return True
    if len(m[0]) != n:
        return False
    return rank(m, p) == n


def inverse(m: Matrix, p: int | None) -> Matrix:
    n = len(m)
    aug = [list(row) + list(e) for row, e in zip(m, identity(n))]
    aug = [[to_field(x, p) for x in row] for row in aug]
    rows, pivots = _rref_rows(aug, 2 * n, p)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(r[n:]) for r in rows)
