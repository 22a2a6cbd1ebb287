"""Brute-force oracles used to cross-check the main algorithms.

These deliberately avoid the code paths they check: submodules come from the
full product of subspace lists filtered by invariance, and Ext^1 comes from
an explicit projective presentation rather than from the Euler matrix.
"""

from __future__ import annotations

import functools
import itertools

from . import linalg as la
from . import representation as rp
from .errors import UnsupportedError
from .quiver import all_paths_acyclic, is_acyclic


def _code(vec, p: int) -> int:
    out = 0
    for x in vec:
        out = out * p + x
    return out


def _elements(sub: la.Subspace, p: int) -> frozenset:
    """Every vector of ``sub``, encoded as a base-p integer."""
    out = set()
    for coeffs in itertools.product(range(p), repeat=sub.dim):
        vec = [0] * sub.ambient
        for c, b in zip(coeffs, sub.basis):
            if c:
                vec = [(x + c * y) % p for x, y in zip(vec, b)]
        out.add(_code(vec, p))
    return frozenset(out)


def submodule_oracle(m: rp.Representation, cap: int = 200_000) -> set:
    """Canonical subspace tuples of all submodules, by exhaustive search.

    Every tuple of subspaces is tested; a tuple is kept when each arrow maps
    the full element set of its source subspace into the target subspace.
    """
    q = m.quiver
    p = m.p
    lists = [la.enumerate_all_subspaces(d, p, cap) for d in m.dims]
    elems = [[_elements(sub, p) for sub in subs] for subs in lists]
    arrows = []
    for a, mat in zip(q.arrows, m.mats):
        i, j = q.vertex_index[a.source], q.vertex_index[a.target]
        table = {
            _code(u, p): _code(la.matvec(mat, u, p), p) if m.dims[j] else 0
            for u in itertools.product(range(p), repeat=m.dims[i])
        }
        images = [frozenset(table[x] for x in es) for es in elems[i]]
        arrows.append((i, j, images))
    incl: dict = {}

    def fits(k, u, w):
        key = (k, u, w)
        if key not in incl:
            i, j, images = arrows[k]
            incl[key] = images[u] <= elems[j][w]
        return incl[key]

    out = set()
    n = len(m.dims)
    for choice in itertools.product(*(range(len(x)) for x in lists)):
        if all(fits(k, choice[i], choice[j]) for k, (i, j, _) in enumerate(arrows)):
            out.add(tuple(lists[v][choice[v]] for v in range(n)))
    return out


def _require_hereditary(m: rp.Representation):
    if not is_acyclic(m.quiver) or m.presentation.relations:
        raise UnsupportedError("the Ext oracle needs an acyclic quiver without relations")


@functools.lru_cache(maxsize=4096)
def syzygy(m: rp.Representation) -> tuple[rp.Representation, tuple[int, ...]]:
    """Kernel of the projective cover P_0 = sum_i P_i^{d_i} -> m, and the class of P_0."""
    _require_hereditary(m)
    q = m.quiver
    p = m.p
    pres = m.presentation
    summands = []  # (vertex, basis index k, paths from vertex)
    for i, v in enumerate(q.vertices):
        paths = all_paths_acyclic(q, v)
        for k in range(m.dims[i]):
            summands.append((i, k, paths))
    p0 = rp.zero_representation(pres, p)
    for i, _, _ in summands:
        p0 = rp.direct_sum(p0, rp.projective_module(pres, p, q.vertices[i]))
    # the map P_0 -> m at each vertex j, columns ordered as in the direct sum
    spaces = []
    for j, vj in enumerate(q.vertices):
        cols = []
        for i, k, paths in summands:
            e = tuple(int(x == k) for x in range(m.dims[i]))
            for pth in paths:
                if pth.target == vj:
                    cols.append(la.matvec(m.path_matrix(pth), e, p))
        if len(cols) != p0.dims[j]:
            raise AssertionError("projective basis mismatch")
        mat = la.transpose(tuple(cols), m.dims[j]) if cols else la.zero_matrix(m.dims[j], 0)
        spaces.append(la.kernel(mat, p, p0.dims[j]))
    omega = rp.Submodule(p0, tuple(spaces))
    if not rp.is_invariant(p0, omega.spaces):
        raise AssertionError("kernel of the projective cover is not a submodule")
    return rp.restrict(p0, omega), p0.dims


def ext1_dim(m: rp.Representation, n: rp.Representation) -> int:
    """dim Ext^1(m, n) from 0 -> Hom(m,n) -> Hom(P_0,n) -> Hom(Omega,n) -> Ext^1(m,n) -> 0."""
    omega, _ = syzygy(m)
    # P_0 has m.dims[i] copies of P_i and Hom(P_i, n) = n_i
    hom_p0 = sum(a * b for a, b in zip(m.dims, n.dims))
    return rp.hom_dim(omega, n) - hom_p0 + rp.hom_dim(m, n)


def euler_oracle(m: rp.Representation, n: rp.Representation) -> int:
    return rp.hom_dim(m, n) - ext1_dim(m, n)
