"""Finite-dimensional representations of a quiver with relations over F_p.

A representation assigns ``F_p^{d_i}`` to each vertex and a ``d_target x d_source``
matrix to each arrow.  Everything here is exact and works over small prime
fields only: complete submodule enumeration, which King stability quantifies
over, is finite only over a finite field.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from . import linalg as la
from .errors import CapExceeded, IncompatibleError, RelationError, ShapeError, UnsupportedError
from .quiver import Path, QuiverPresentation, all_paths_acyclic, enumerate_paths, is_acyclic

DEFAULT_SUBMODULE_CAP = 50_000
DEFAULT_ISO_CAP = 100_000


def _zero(rows: int, cols: int) -> la.Matrix:
    return la.zero_matrix(rows, cols)


@dataclass(frozen=True)
class Representation:
    """Use :func:`make_representation` to build one from user data."""

    presentation: QuiverPresentation = field(repr=False)
    p: int
    dims: tuple[int, ...]
    mats: tuple[la.Matrix, ...]

    def __post_init__(self):
        q = self.presentation.quiver
        if len(self.dims) != len(q.vertices):
            raise ShapeError(f"dimension vector has length {len(self.dims)}, quiver has {len(q.vertices)} vertices")
        if any(d < 0 for d in self.dims):
            raise ShapeError("negative dimension")
        if len(self.mats) != len(q.arrows):
            raise ShapeError("one matrix per arrow required")
        for a, m in zip(q.arrows, self.mats):
            r, c = self.dims[q.vertex_index[a.target]], self.dims[q.vertex_index[a.source]]
            if len(m) != r or any(len(row) != c for row in m):
                got = (len(m), len(m[0]) if m else "?")
                raise ShapeError(f"arrow {a.name}: expected a {r}x{c} matrix, got {got[0]}x{got[1]}")
        for k, rel in enumerate(self.presentation.relations):
            res = self.relation_residual(rel)
            if not la.is_zero(res):
                raise RelationError(f"relation {k} ({rel}) is violated; residual {res}", k, res)

    @property
    def quiver(self):
        return self.presentation.quiver

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def dim_at(self, vertex: str) -> int:
        return self.dims[self.quiver.vertex_index[vertex]]

    def mat(self, arrow: str) -> la.Matrix:
        return self.mats[self.quiver.arrow_index[arrow]]

    def path_matrix(self, path: Path) -> la.Matrix:
        d = self.dim_at(path.source)
        m = la.identity(d)
        cur = d
        for name in path.arrows:
            a = self.quiver.arrow(name)
            nxt = self.dim_at(a.target)
            m = la.matmul(self.mat(name), m, self.p, cols=d) if nxt else _zero(0, d)
            cur = nxt
        return m

    def relation_residual(self, rel) -> la.Matrix:
        p = self.p
        rows, cols = self.dim_at(rel.target), self.dim_at(rel.source)
        acc = _zero(rows, cols)
        for c, pth in rel.terms:
            coef = la.to_field(c, p)
            acc = la.mat_add(acc, self.path_matrix(pth), p, scale=coef)
        return acc

    def to_json(self) -> dict:
        q = self.quiver
        return {
            "p": self.p,
            "dim": list(self.dims),
            "matrices": {a.name: [list(r) for r in m] for a, m in zip(q.arrows, self.mats)},
        }

    def __str__(self) -> str:
        body = ", ".join(f"{a.name}={[list(r) for r in m]}" for a, m in zip(self.quiver.arrows, self.mats))
        return f"Rep(p={self.p}, dim={self.dims}{', ' if body else ''}{body})"


def make_representation(pres: QuiverPresentation, p: int, dims, matrices: Mapping | None = None) -> Representation:
    """Build a relation-checked representation.

    ``matrices`` maps arrow names to ``d_target x d_source`` nested sequences;
    arrows left out get the zero map.
    """
    la.check_prime(p)
    q = pres.quiver
    dims = tuple(int(d) for d in dims)
    matrices = dict(matrices or {})
    unknown = set(matrices) - set(q.arrow_index)
    if unknown:
        raise ShapeError(f"unknown arrows {sorted(unknown)}")
    if len(dims) != len(q.vertices):
        raise ShapeError(f"dimension vector has length {len(dims)}, quiver has {len(q.vertices)} vertices")
    mats = []
    for a in q.arrows:
        r, c = dims[q.vertex_index[a.target]], dims[q.vertex_index[a.source]]
        if a.name in matrices:
            raw = [list(row) for row in matrices[a.name]]
            if r == 0 and raw in ([], [[]]):
                raw = []
            if len(raw) != r or any(len(row) != c for row in raw):
                got = f"{len(raw)}x{len(raw[0]) if raw else 0}"
                raise ShapeError(f"arrow {a.name}: expected a {r}x{c} matrix, got {got}")
            mats.append(tuple(tuple(la.to_field(x, p) for x in row) for row in raw))
        else:
            mats.append(_zero(r, c))
    return Representation(pres, p, dims, tuple(mats))


def zero_representation(pres: QuiverPresentation, p: int) -> Representation:
    return make_representation(pres, p, (0,) * pres.n)


def vertex_simple(pres: QuiverPresentation, p: int, vertex: str) -> Representation:
    dims = tuple(int(v == vertex) for v in pres.quiver.vertices)
    if sum(dims) != 1:
        raise ValueError(f"unknown vertex {vertex}")
    return make_representation(pres, p, dims)


def _path_module(pres: QuiverPresentation, p: int, vertex: str):
    """kQ e_i for acyclic Q, as (dims, mats, basis index)."""
    q = pres.quiver
    paths = all_paths_acyclic(q, vertex)
    by_end: dict[str, list[Path]] = {v: [] for v in q.vertices}
    for pth in paths:
        by_end[pth.target].append(pth)
    index = {pth.arrows: (pth.target, k) for v in q.vertices for k, pth in enumerate(by_end[v])}
    dims = tuple(len(by_end[v]) for v in q.vertices)
    mats = {}
    for a in q.arrows:
        rows, cols = len(by_end[a.target]), len(by_end[a.source])
        m = [[0] * cols for _ in range(rows)]
        for k, pth in enumerate(by_end[a.source]):
            _, r = index[pth.arrows + (a.name,)]
            m[r][k] = 1
        mats[a.name] = m
    return dims, mats, index


def projective_module(pres: QuiverPresentation, p: int, vertex: str) -> Representation:
    """P_i = A e_i, with basis the paths starting at ``vertex`` modulo relations."""
    if not is_acyclic(pres.quiver):
        raise UnsupportedError("projective modules of cyclic quivers are infinite-dimensional")
    la.check_prime(p)
    free = QuiverPresentation(pres.quiver, ())
    dims, mats, index = _path_module(free, p, vertex)
    big = make_representation(free, p, dims, mats)
    if not pres.relations:
        return make_representation(pres, p, dims, mats)
    q = pres.quiver
    gens = []
    for rel in pres.relations:
        for w in all_paths_acyclic(q, vertex):
            if w.target != rel.source:
                continue
            tgt = q.vertex_index[rel.target]
            vec = [0] * dims[tgt]
            for c, pth in rel.terms:
                _, k = index[w.arrows + pth.arrows]
                vec[k] = (vec[k] + la.to_field(c, p)) % p
            gens.append((tgt, tuple(vec)))
    ideal = submodule_generated(big, gens)
    quo = quotient(big, ideal)
    return Representation(pres, p, quo.dims, quo.mats)


def direct_sum(m: Representation, n: Representation) -> Representation:
    _compatible(m, n)
    dims = tuple(a + b for a, b in zip(m.dims, n.dims))
    mats = []
    for a, x, y in zip(m.quiver.arrows, m.mats, n.mats):
        xc = m.dim_at(a.source)
        yc = n.dim_at(a.source)
        rows = [tuple(r) + (0,) * yc for r in x] + [(0,) * xc + tuple(r) for r in y]
        mats.append(tuple(rows))
    return Representation(m.presentation, m.p, dims, tuple(mats))


def _compatible(m: Representation, n: Representation) -> None:
    if m.p != n.p:
        raise IncompatibleError(f"representations over F_{m.p} and F_{n.p}")
    if m.presentation != n.presentation:
        raise IncompatibleError("representations of different presentations")


# ------------------------------------------------------------ submodules


@dataclass(frozen=True)
class Submodule:
    """Per-vertex subspaces of ``parent`` closed under every arrow."""

    parent: Representation = field(compare=False, repr=False)
    spaces: tuple[la.Subspace, ...]

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)

    @cached_property
    def total_dim(self) -> int:
        return sum(self.dims)

    def __le__(self, other: "Submodule") -> bool:
        return all(a <= b for a, b in zip(self.spaces, other.spaces))

    def __add__(self, other: "Submodule") -> "Submodule":
        return Submodule(self.parent, tuple(la.subspace_sum(a, b) for a, b in zip(self.spaces, other.spaces)))

    def sort_key(self):
        return (self.total_dim, self.dims, tuple(s.basis for s in self.spaces))


def is_invariant(m: Representation, spaces) -> bool:
    q = m.quiver
    for a, mat in zip(q.arrows, m.mats):
        i, j = q.vertex_index[a.source], q.vertex_index[a.target]
        for v in spaces[i].basis:
            if not la.contains(spaces[j], la.matvec(mat, v, m.p)):
                return False
    return True


def make_submodule(m: Representation, spaces) -> Submodule:
    spaces = tuple(spaces)
    if len(spaces) != len(m.dims) or any(s.ambient != d for s, d in zip(spaces, m.dims)):
        raise ShapeError("subspace ambient dimensions do not match the representation")
    if not is_invariant(m, spaces):
        raise ShapeError("subspaces are not closed under the arrow maps")
    return Submodule(m, spaces)


def zero_submodule(m: Representation) -> Submodule:
    return Submodule(m, tuple(la.Subspace.zero(d, m.p) for d in m.dims))


def full_submodule(m: Representation) -> Submodule:
    return Submodule(m, tuple(la.Subspace.full(d, m.p) for d in m.dims))


def _close(m: Representation, spaces: list[la.Subspace]) -> tuple[la.Subspace, ...]:
    """Smallest arrow-invariant family containing ``spaces``."""
    q = m.quiver
    out_arrows = [[] for _ in q.vertices]
    for a, mat in zip(q.arrows, m.mats):
        out_arrows[q.vertex_index[a.source]].append((q.vertex_index[a.target], mat))
    work = deque(i for i, s in enumerate(spaces) if s.dim)
    queued = set(work)
    while work:
        i = work.popleft()
        queued.discard(i)
        for j, mat in out_arrows[i]:
            if not mat:
                continue
            new = la.add_vectors(spaces[j], (la.matvec(mat, v, m.p) for v in spaces[i].basis))
            if new is not spaces[j]:
                spaces[j] = new
                if j not in queued:
                    work.append(j)
                    queued.add(j)
    return tuple(spaces)


def submodule_generated(m: Representation, generators) -> Submodule:
    """Submodule generated by ``(vertex_index, vector)`` pairs."""
    spaces = [la.Subspace.zero(d, m.p) for d in m.dims]
    for i, v in generators:
        spaces[i] = la.add_vectors(spaces[i], [tuple(x % m.p for x in v)])
    return Submodule(m, _close(m, spaces))


def cyclic_submodules(m: Representation) -> list[Submodule]:
    """Distinct cyclic submodules, one generator per projective point at each vertex."""
    return [sub for sub, _ in _cyclic_with_generators(m)]


def _cyclic_with_generators(m: Representation) -> list:
    seen = {}
    for i, d in enumerate(m.dims):
        for v in la.projective_points(d, m.p):
            sub = submodule_generated(m, [(i, v)])
            seen.setdefault(sub.spaces, (sub, (i, v)))
    return sorted(seen.values(), key=lambda sg: sg[0].sort_key())


def all_submodules(m: Representation, cap: int = DEFAULT_SUBMODULE_CAP) -> list[Submodule]:
    """The full submodule lattice, as the join-closure of the cyclic submodules.

    Sorted by total dimension, then dimension vector, then RREF bases;
    includes the zero submodule and ``m`` itself.  Over F_2 the same closure
    runs on bit-packed vectors.
    """
    cache = m.__dict__.setdefault("_lattice_cache", {})
    if "lattice" in cache:
        lat = cache["lattice"]
        if len(lat) > cap:
            raise CapExceeded(f"submodule lattice has {len(lat)} elements, cap is {cap}", partial=len(lat))
        return list(lat)
    build = _packed_lattice_f2 if m.p == 2 else _join_closure
    lat = tuple(sorted(build(m, cap), key=Submodule.sort_key))
    cache["lattice"] = lat
    return list(lat)


def _join_closure(m: Representation, cap: int) -> list[Submodule]:
    zero = zero_submodule(m)
    lattice = {zero.spaces: zero}
    for c, (i, gen) in _cyclic_with_generators(m):
        for x in list(lattice.values()):
            if not any(x.spaces[i].reduce(gen)):
                continue  # c <= x already
            s = x + c
            if s.spaces not in lattice:
                lattice[s.spaces] = s
                if len(lattice) > cap:
                    raise CapExceeded(
                        f"submodule lattice exceeds cap {cap} (partial count {len(lattice)})", partial=len(lattice)
                    )
    return list(lattice.values())


# Over F_2 the lattice is built on bit-packed vectors: coordinate 0 is the most
# significant bit, so a descending tuple of fully reduced rows is exactly the
# RREF basis used by la.Subspace.


def _pack(vec) -> int:
    out = 0
    for x in vec:
        out = (out << 1) | (x & 1)
    return out


def _unpack(v: int, d: int) -> tuple:
    return tuple((v >> (d - 1 - k)) & 1 for k in range(d))


def _packed_action(mat, d_src: int):
    rows = [_pack(r) for r in mat]
    nt = len(rows)

    def apply(v: int) -> int:
        out = 0
        for r in rows:
            out = (out << 1) | ((r & v).bit_count() & 1)
        return out

    if nt == 0 or d_src == 0:
        return lambda v: 0
    if d_src <= 12:
        table = [apply(v) for v in range(1 << d_src)]
        return table.__getitem__
    return apply


def _packed_reduce(rows: tuple, v: int) -> int:
    for r in rows:
        if (v >> (r.bit_length() - 1)) & 1:
            v ^= r
    return v


def _packed_insert(rows: tuple, r: int) -> tuple:
    hb = r.bit_length() - 1
    out = [x ^ r if (x >> hb) & 1 else x for x in rows]
    out.append(r)
    out.sort(reverse=True)
    return tuple(out)


def _packed_lattice_f2(m: Representation, cap: int) -> list[Submodule]:
    q = m.quiver
    n = len(m.dims)
    out_arrows = [[] for _ in range(n)]
    for a, mat in zip(q.arrows, m.mats):
        i, j = q.vertex_index[a.source], q.vertex_index[a.target]
        if m.dims[i] and m.dims[j]:
            out_arrows[i].append((j, _packed_action(mat, m.dims[i])))

    def close(spaces: tuple, i: int, g: int) -> tuple:
        spaces = list(spaces)
        work = [(i, g)]
        while work:
            k, v = work.pop()
            r = _packed_reduce(spaces[k], v)
            if not r:
                continue
            spaces[k] = _packed_insert(spaces[k], r)
            for j, act in out_arrows[k]:
                w = act(r)
                if w:
                    work.append((j, w))
        return tuple(spaces)

    zero = tuple(() for _ in range(n))
    cyclic = {}
    for i, d in enumerate(m.dims):
        for g in range(1, 1 << d):
            c = close(zero, i, g)
            if c not in cyclic:
                cyclic[c] = (i, g)
    lattice = {zero}
    for i, g in cyclic.values():
        for x in list(lattice):
            if not _packed_reduce(x[i], g):
                continue
            s = close(x, i, g)
            if s not in lattice:
                lattice.add(s)
                if len(lattice) > cap:
                    raise CapExceeded(
                        f"submodule lattice exceeds cap {cap} (partial count {len(lattice)})", partial=len(lattice)
                    )
    return [
        Submodule(m, tuple(la.Subspace(d, tuple(_unpack(r, d) for r in rows), 2) for d, rows in zip(m.dims, x)))
        for x in lattice
    ]


def submodule_dim_vectors(m: Representation, cap: int = DEFAULT_SUBMODULE_CAP) -> frozenset[tuple[int, ...]]:
    """Distinct dimension vectors of submodules; stability only depends on these."""
    cache = m.__dict__.setdefault("_lattice_cache", {})
    if "dimvecs" not in cache:
        cache["dimvecs"] = frozenset(s.dims for s in all_submodules(m, cap))
    return cache["dimvecs"]


# ------------------------------------------------------- sub and quotient


def restrict(m: Representation, n: Submodule) -> Representation:
    """The submodule ``n`` as a representation, in the coordinates of its RREF bases."""
    q = m.quiver
    mats = []
    for a, mat in zip(q.arrows, m.mats):
        i, j = q.vertex_index[a.source], q.vertex_index[a.target]
        src, tgt = n.spaces[i], n.spaces[j]
        cols = []
        for b in src.basis:
            w = la.matvec(mat, b, m.p)
            if any(tgt.reduce(w)):
                raise ShapeError("not a submodule: arrow image leaves the subspace")
            cols.append(tgt.coordinates(w))
        mats.append(la.transpose(tuple(cols), tgt.dim) if cols else _zero(tgt.dim, 0))
    return Representation(m.presentation, m.p, n.dims, tuple(mats))


def quotient_maps(m: Representation, n: Submodule) -> list[la.Matrix]:
    """Projection matrices ``M_i -> M_i / N_i`` onto the non-pivot coordinates of N_i."""
    maps = []
    for d, sub in zip(m.dims, n.spaces):
        pivots = set(sub.pivots)
        comp = [c for c in range(d) if c not in pivots]
        cols = [sub.reduce(e) for e in la.identity(d)]
        maps.append(tuple(tuple(col[c] for col in cols) for c in comp))
    return maps


def quotient(m: Representation, n: Submodule) -> Representation:
    if not is_invariant(m, n.spaces):
        raise ShapeError("not a submodule: subspaces are not arrow-invariant")
    q = m.quiver
    proj = quotient_maps(m, n)
    comps = [[c for c in range(d) if c not in set(s.pivots)] for d, s in zip(m.dims, n.spaces)]
    dims = tuple(len(c) for c in comps)
    mats = []
    for a, mat in zip(q.arrows, m.mats):
        i, j = q.vertex_index[a.source], q.vertex_index[a.target]
        cols = [proj[j] and la.matvec(proj[j], tuple(row[c] for row in mat) if mat else (), m.p) for c in comps[i]]
        if dims[j] == 0:
            mats.append(())
        elif not cols:
            mats.append(_zero(dims[j], 0))
        else:
            mats.append(la.transpose(tuple(cols)))
    return Representation(m.presentation, m.p, dims, tuple(mats))


def subquotient(m: Representation, lower: Submodule, upper: Submodule) -> Representation:
    """``upper / lower`` for submodules lower <= upper of m."""
    top = restrict(m, upper)
    spaces = []
    for lo, up in zip(lower.spaces, upper.spaces):
        spaces.append(la.Subspace.span((up.coordinates(v) for v in lo.basis), up.dim, m.p))
    return quotient(top, Submodule(top, tuple(spaces)))


# ------------------------------------------------------------------ Hom


@dataclass(frozen=True)
class HomSpace:
    """Basis of Hom(source, target); each element is a tuple of per-vertex matrices."""

    source: Representation = field(repr=False)
    target: Representation = field(repr=False)
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def combine(self, coeffs) -> tuple:
        p = self.source.p
        out = []
        for v, (r, c) in enumerate(zip(self.target.dims, self.source.dims)):
            acc = [[0] * c for _ in range(r)]
            for k, phi in zip(coeffs, self.basis):
                if k:
                    for x in range(r):
                        row = phi[v][x]
                        accx = acc[x]
                        for y in range(c):
                            accx[y] = (accx[y] + k * row[y]) % p
            out.append(tuple(tuple(row) for row in acc))
        return tuple(out)


def hom_space(m: Representation, n: Representation) -> HomSpace:
    """Solve ``phi_j M_a = N_a phi_i`` for all arrows a: i -> j."""
    _compatible(m, n)
    q = m.quiver
    p = m.p
    offsets = []
    total = 0
    for dm, dn in zip(m.dims, n.dims):
        offsets.append(total)
        total += dm * dn

    def var(v, r, c):  # entry (r, c) of phi_v, an n_v x m_v matrix
        return offsets[v] + r * m.dims[v] + c

    eqs = []
    for a, ma, na in zip(q.arrows, m.mats, n.mats):
        i, j = q.vertex_index[a.source], q.vertex_index[a.target]
        for r in range(n.dims[j]):
            for c in range(m.dims[i]):
                row = [0] * total
                for k in range(n.dims[i]):
                    x = na[r][k]
                    if x:
                        row[var(i, k, c)] = (row[var(i, k, c)] + x) % p
                for k in range(m.dims[j]):
                    x = ma[k][c]
                    if x:
                        row[var(j, r, k)] = (row[var(j, r, k)] - x) % p
                eqs.append(row)
    ker = la.kernel(tuple(eqs), p, total)
    basis = []
    for vec in ker.basis:
        phi = []
        for v, (dm, dn) in enumerate(zip(m.dims, n.dims)):
            o = offsets[v]
            phi.append(tuple(tuple(vec[o + r * dm + c] for c in range(dm)) for r in range(dn)))
        basis.append(tuple(phi))
    return HomSpace(m, n, tuple(basis))


def hom_dim(m: Representation, n: Representation) -> int:
    return hom_space(m, n).dim


def _end_dim(m: Representation) -> int:
    cache = m.__dict__.setdefault("_lattice_cache", {})
    if "end_dim" not in cache:
        cache["end_dim"] = hom_dim(m, m)
    return cache["end_dim"]


def is_iso_map(phi, p: int) -> bool:
    return all(la.is_invertible(block, p) for block in phi)


def are_isomorphic(m: Representation, n: Representation, cap: int = DEFAULT_ISO_CAP, seed: int = 0) -> bool:
    """Decide ``m ~= n`` by searching Hom(m, n) for a vertexwise-invertible map.

    Exhaustive when ``p**dim Hom <= cap``; otherwise a seeded random search of
    ``cap`` elements, raising :class:`CapExceeded` if it finds no certificate.
    """
    _compatible(m, n)
    if m.dims != n.dims:
        return False
    if m.mats == n.mats:
        return True
    hom = hom_space(m, n)
    h = hom.dim
    if h != _end_dim(m) or h != _end_dim(n):
        return False
    p = m.p
    if p**h <= cap:
        for coeffs in itertools.product(range(p), repeat=h):
            if any(coeffs) and is_iso_map(hom.combine(coeffs), p):
                return True
        return False
    rng = random.Random(seed)
    for _ in range(cap):
        coeffs = [rng.randrange(p) for _ in range(h)]
        if is_iso_map(hom.combine(coeffs), p):
            return True
    raise CapExceeded(f"isomorphism search over {p}^{h} Hom elements found no certificate within cap {cap}")


# --------------------------------------------------------------- cycles


def cycles_act_as_zero(m: Representation, max_cycle_len: int, nilpotent: bool = False) -> bool:
    """Whether every cyclic path of length <= max_cycle_len acts as zero on ``m``.

    With ``nilpotent=True`` the weaker condition that each such cycle acts
    nilpotently is tested.  This is a bounded check, not a proof for longer
    cycles.
    """
    if max_cycle_len < 1:
        raise ValueError("max_cycle_len must be >= 1")
    q = m.quiver
    for v in q.vertices:
        for pth in enumerate_paths(q, v, max_cycle_len):
            if pth.length == 0 or pth.target != v:
                continue
            mat = m.path_matrix(pth)
            if nilpotent:
                power = mat
                for _ in range(max(len(mat) - 1, 0)):
                    power = la.matmul(power, mat, m.p, cols=len(mat))
                if not la.is_zero(power):
                    return False
            elif not la.is_zero(mat):
                return False
    return True
