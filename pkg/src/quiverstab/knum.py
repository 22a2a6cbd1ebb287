"""Numerical Grothendieck group, Euler form and the pairing with projectives.

Classes are written in the basis of vertex simples ``[S_i]``, so a class is a
dimension vector and the Euler form is an integer matrix ``E`` with
``chi(d, e) = d^T E e``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DimensionMismatch, UnsupportedError
from .quiver import QuiverPresentation, is_acyclic


@dataclass(frozen=True)
class EulerMatrix:
    matrix: tuple[tuple[int, ...], ...]
    source: str = "acyclic"
    notes: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.matrix)

    def chi(self, d: Sequence[int], e: Sequence[int]) -> int:
        if len(d) != self.n or len(e) != self.n:
            raise DimensionMismatch(f"classes of length {len(d)}, {len(e)} for an Euler form of size {self.n}")
        return sum(d[i] * self.matrix[i][j] * e[j] for i in range(self.n) for j in range(self.n))

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "source": self.source, "notes": list(self.notes)}


@dataclass(frozen=True)
class TorTable:
    """Multiplicities ``d^l_{ij}`` of ``A e_i (x) e_j A`` in degree l of the bimodule resolution.

    ``entries`` maps ``(l, i, j)`` (dense vertex indices) to a nonnegative
    integer.  Degree 0 is always the identity.  Entries above ``gldim`` are
    kept in ``dropped`` and ignored by the Euler form.
    """

    n: int
    gldim: int
    entries: Mapping = field(default_factory=dict)
    dropped: tuple = ()

    def __post_init__(self):
        ent = dict(self.entries)
        for (l, i, j), d in ent.items():
            if d < 0:
                raise ValueError(f"negative Tor multiplicity at degree {l}, ({i},{j})")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise DimensionMismatch(f"Tor entry ({i},{j}) outside {self.n} vertices")
            if l == 0 and d != int(i == j):
                raise ValueError("degree-0 Tor multiplicities must be the identity")
        for i in range(self.n):
            for j in range(self.n):
                ent.setdefault((0, i, j), int(i == j))
        kept = {k: d for k, d in ent.items() if k[0] <= self.gldim}
        dropped = tuple(sorted(set(self.dropped) | {k for k in ent if k[0] > self.gldim}))
        object.__setattr__(self, "entries", kept)
        object.__setattr__(self, "dropped", dropped)

    @property
    def truncated(self) -> bool:
        return bool(self.dropped)


def canonical_tor_table(pres: QuiverPresentation) -> TorTable:
    """The length-one bimodule resolution of a hereditary path algebra."""
    if not is_acyclic(pres.quiver) or pres.relations:
        raise UnsupportedError("the canonical Tor table is only defined for acyclic quivers without relations")
    q = pres.quiver
    entries = {}
    for a in q.arrows:
        key = (1, q.vertex_index[a.source], q.vertex_index[a.target])
        entries[key] = entries.get(key, 0) + 1
    return TorTable(len(q.vertices), 1, entries)


def euler_form_acyclic(pres: QuiverPresentation) -> EulerMatrix:
    """``E_ij = delta_ij - #arrows(i -> j)`` for a hereditary path algebra."""
    if not is_acyclic(pres.quiver):
        raise UnsupportedError("quiver has oriented cycles; supply Tor data and use euler_form_from_tor")
    if pres.relations:
        raise UnsupportedError("presentation has relations; supply Tor data and use euler_form_from_tor")
    q = pres.quiver
    n = len(q.vertices)
    e = [[int(i == j) for j in range(n)] for i in range(n)]
    for a in q.arrows:
        e[q.vertex_index[a.source]][q.vertex_index[a.target]] -= 1
    return EulerMatrix(tuple(tuple(r) for r in e), "acyclic")


def euler_form_from_tor(tor: TorTable) -> EulerMatrix:
    """``E_ij = sum_l (-1)^l d^l_ij`` over the retained degrees."""
    e = [[0] * tor.n for _ in range(tor.n)]
    for (l, i, j), d in tor.entries.items():
        e[i][j] += (-1) ** l * d
    notes = [
        "index convention (i, j) = multiplicity of A e_i (x) e_j A; validated against the hereditary closed form only"
    ]
    if tor.truncated:
        degs = sorted({k[0] for k in tor.dropped})
        notes.append(f"Tor data truncated at declared global dimension {tor.gldim}; dropped degrees {degs}")
    return EulerMatrix(tuple(tuple(r) for r in e), "tor", tuple(notes))


def pairing(theta: Sequence, d: Sequence[int]) -> Fraction:
    """``theta(d) = sum_i theta_i d_i`` with theta in the basis dual to the simples."""
    if len(theta) != len(d):
        raise DimensionMismatch(f"covector of length {len(theta)} against class of length {len(d)}")
    return sum((Fraction(t) * x for t, x in zip(theta, d)), Fraction(0))


@dataclass(frozen=True)
class PairingReport:
    passed: bool
    projective_classes: tuple[tuple[int, ...], ...]
    gram: tuple[tuple[int, ...], ...]  # gram[j][i] = chi([P_j], [S_i])
    euler: EulerMatrix

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "projective_classes": [list(r) for r in self.projective_classes],
            "gram": [list(r) for r in self.gram],
            "euler": self.euler.to_json(),
            "note": "rows are [P_j]; a covector theta has coordinate theta_i against [P_i] equal to theta([P_i] dual), "
            "which is its simple-dual coordinate when the gram matrix is the identity",
        }


def verify_perfect_pairing(pres: QuiverPresentation, p: int = 2, euler: EulerMatrix | None = None) -> PairingReport:
    """Check ``chi([P_j], [S_i]) = delta_ij`` using projective modules built over F_p."""
    from .representation import projective_module

    if not is_acyclic(pres.quiver):
        raise UnsupportedError("perfect-pairing check needs an acyclic quiver (finite projectives)")
    if euler is None:
        euler = euler_form_acyclic(pres)
    n = len(pres.quiver.vertices)
    classes = tuple(projective_module(pres, p, v).dims for v in pres.quiver.vertices)
    simples = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    gram = tuple(tuple(euler.chi(pj, si) for si in simples) for pj in classes)
    passed = all(gram[j][i] == int(i == j) for i in range(n) for j in range(n))
    return PairingReport(passed, classes, gram, euler)
