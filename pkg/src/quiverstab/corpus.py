"""Test corpora of representations over small prime fields.

Small matrix spaces are enumerated literally.  Larger ones are reduced to one
representative per orbit of ``prod_i GL(d_i, F_p)`` acting by
``X_a -> g_j X_a g_i^{-1}``, processing one arrow at a time with numpy
permutation arrays.  Stabilizers at intermediate arrows are approximated by
a seeded sample of Schreier generators; a smaller subgroup only splits orbits
further, so every isomorphism class is still represented (possibly more than
once).  Loops with a relation ``x^m`` beyond numpy range fall back to nilpotent
Jordan forms.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import representation as rp
from .errors import CapExceeded, RelationError
from .quiver import QuiverPresentation

LITERAL_CAP = 16
ORBIT_SPACE_CAP = 2**17
SCHREIER_SAMPLE = 40
BUNDLED_QUIVERS = {"k2": "k2.qv", "a3": "a3.qv", "loop_x2": "loop_x2.qv", "kron3": "kron3.qv"}
BUNDLED_FAMILY_FILES = (
    "k2_taut.qv",
    "k2_const.qv",
    "k2_twisted_const.qv",
    "k2_square.qv",
    "k2_v21.qv",
    "a3.qv",
    "kron3.qv",
    "loop_x2.qv",
)


def data_path(name: str):
    return resources.files("quiverstab") / "data" / name


def bundled_presentation(name: str) -> QuiverPresentation:
    from .document import parse_document

    return parse_document(data_path(BUNDLED_QUIVERS.get(name, name)).read_text()).presentation


def bundled_document(filename: str):
    from .document import parse_document

    return parse_document(data_path(filename).read_text())


def bundled_families() -> list:
    """(family, default params) for every family shipped with the package."""
    out = []
    for fname in BUNDLED_FAMILY_FILES:
        doc = bundled_document(fname)
        for fam in doc.families.values():
            out.append((fam, doc.default_params()))
    return out


# ------------------------------------------------------------ group elements


def _mat_inv_mod(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    aug = np.concatenate([m % p, np.eye(n, dtype=np.int64)], axis=1)
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r, c] % p)
        aug[[c, piv]] = aug[[piv, c]]
        aug[c] = aug[c] * pow(int(aug[c, c]), -1, p) % p
        for r in range(n):
            if r != c and aug[r, c]:
                aug[r] = (aug[r] - aug[r, c] * aug[c]) % p
    return aug[:, n:]


def gl_generators(d: int, p: int) -> list[np.ndarray]:
    """Elementary transvections plus one diagonal generator of F_p^*: these generate GL(d, p)."""
    gens = []
    for i in range(d):
        for j in range(d):
            if i != j:
                g = np.eye(d, dtype=np.int64)
                g[i, j] = 1
                gens.append(g)
    if p > 2 and d:
        w = next(x for x in range(2, p) if all(pow(x, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)))
        g = np.eye(d, dtype=np.int64)
        g[0, 0] = w
        gens.append(g)
    return gens


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class _Group:
    """Elements are tuples of (g, g^{-1}) pairs, one per vertex."""

    def __init__(self, dims, p):
        self.dims = dims
        self.p = p

    def identity(self):
        return tuple((np.eye(d, dtype=np.int64), np.eye(d, dtype=np.int64)) for d in self.dims)

    def generators(self):
        out = []
        for v, d in enumerate(self.dims):
            for g in gl_generators(d, self.p):
                el = list(self.identity())
                el[v] = (g, _mat_inv_mod(g, self.p))
                out.append(tuple(el))
        return out

    def mul(self, a, b):
        p = self.p
        return tuple(((x[0] @ y[0]) % p, (y[1] @ x[1]) % p) for x, y in zip(a, b))

    def inv(self, a):
        return tuple((x[1], x[0]) for x in a)

    def is_identity(self, a):
        return all(np.array_equal(x[0], np.eye(x[0].shape[0], dtype=np.int64)) for x in a)


class _ArrowSpace:
    """All r x c matrices over F_p, indexed by base-p digits (row-major, first entry most significant)."""

    def __init__(self, r, c, p):
        self.r, self.c, self.p = r, c, p
        self.size = p ** (r * c)
        self.weights = p ** np.arange(r * c - 1, -1, -1, dtype=np.int64)
        if r * c:
            idx = np.arange(self.size, dtype=np.int64)
            self.mats = ((idx[:, None] // self.weights[None, :]) % p).reshape(self.size, r, c)
        else:
            self.mats = np.zeros((1, r, c), dtype=np.int64)

    def encode(self, mats: np.ndarray) -> np.ndarray:
        return mats.reshape(mats.shape[0], -1) @ self.weights

    def decode(self, index: int) -> tuple:
        m = self.mats[index]
        return tuple(tuple(int(x) for x in row) for row in m)

    def perm(self, g_tgt: np.ndarray, ginv_src: np.ndarray) -> np.ndarray:
        if self.r * self.c == 0:
            return np.zeros(1, dtype=np.int64)
        y = np.matmul(np.matmul(g_tgt, self.mats) % self.p, ginv_src) % self.p
        return self.encode(y)


def _orbits(size: int, perms: list[np.ndarray]):
    if not perms:
        return size, np.arange(size)
    src = np.concatenate([np.arange(size)] * len(perms))
    dst = np.concatenate(perms)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(size, size))
    return connected_components(graph, directed=True, connection="weak")


def _stabilizer_sample(group, gens, perms, root, rng):
    """Schreier generators of the stabilizer of ``root``, sampled when the orbit is large."""
    parent = {root: None}
    order = [root]
    k = 0
    while k < len(order):
        y = order[k]
        k += 1
        for gi, pm in enumerate(perms):
            z = int(pm[y])
            if z not in parent:
                parent[z] = (y, gi)
                order.append(z)
    trans = {root: group.identity()}
    for y in order[1:]:
        py, gi = parent[y]
        trans[y] = group.mul(gens[gi], trans[py])
    pairs = [(y, gi) for y in order for gi in range(len(gens))]
    if len(pairs) > SCHREIER_SAMPLE:
        pairs = rng.sample(pairs, SCHREIER_SAMPLE)
    out = []
    for y, gi in pairs:
        z = int(perms[gi][y])
        el = group.mul(group.inv(trans[z]), group.mul(gens[gi], trans[y]))
        if not group.is_identity(el):
            out.append(el)
    return out


def orbit_representatives(pres: QuiverPresentation, dims, p: int, seed: int = 0) -> list[rp.Representation]:
    """At least one representative of every isomorphism class of dimension ``dims``."""
    q = pres.quiver
    dims = tuple(dims)
    group = _Group(dims, p)
    shapes = [(q.vertex_index[a.target], q.vertex_index[a.source]) for a in q.arrows]
    spaces = []
    for j, i in shapes:
        sp = p ** (dims[j] * dims[i])
        if sp > ORBIT_SPACE_CAP:
            raise CapExceeded(f"arrow space of size {sp} exceeds the orbit enumeration limit {ORBIT_SPACE_CAP}")
        spaces.append(_ArrowSpace(dims[j], dims[i], p))
    rng = random.Random(seed)
    states = [((), group.generators())]
    for k, ((j, i), space) in enumerate(zip(shapes, spaces)):
        last = k == len(shapes) - 1
        nxt = []
        for prefix, gens in states:
            perms = [space.perm(g[j][0], g[i][1]) for g in gens]
            _, labels = _orbits(space.size, perms)
            roots = np.full(labels.max() + 1, space.size, dtype=np.int64)
            np.minimum.at(roots, labels, np.arange(space.size))
            for root in roots.tolist():
                stab = [] if last else _stabilizer_sample(group, gens, perms, root, rng)
                nxt.append((prefix + (root,), stab))
        states = nxt
    out = []
    for prefix, _ in states:
        mats = tuple(space.decode(ix) for space, ix in zip(spaces, prefix))
        try:
            out.append(rp.Representation(pres, p, dims, mats))
        except RelationError:
            continue
    if not q.arrows:
        out = [rp.make_representation(pres, p, dims)]
    return out


def _loop_power(pres: QuiverPresentation):
    """m if the presentation is one vertex, one loop x and the single relation x^m."""
    q = pres.quiver
    if len(q.vertices) != 1 or len(q.arrows) != 1 or len(pres.relations) != 1:
        return None
    (c, pth), *rest = pres.relations[0].terms
    if rest or c == 0:
        return None
    return len(pth.arrows)


def _partitions(n: int, largest: int):
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def jordan_representatives(pres: QuiverPresentation, d: int, p: int, m: int) -> list[rp.Representation]:
    """Nilpotent Jordan forms with blocks of size <= m: the isoclasses of k[x]/(x^m)-modules."""
    out = []
    for parts in _partitions(d, m):
        x = [[0] * d for _ in range(d)]
        pos = 0
        for size in parts:
            for r in range(size - 1):
                x[pos + r + 1][pos + r] = 1
            pos += size
        out.append(rp.make_representation(pres, p, (d,), {pres.quiver.arrows[0].name: x}))
    return out


def literal_representations(pres: QuiverPresentation, dims, p: int, cap: int | None = None) -> list[rp.Representation]:
    """Every relation-satisfying matrix tuple of dimension ``dims``."""
    from .walls import DEFAULT_CENSUS_CAP, all_representations

    return list(all_representations(pres, dims, p, cap=cap or DEFAULT_CENSUS_CAP))


def matrix_tuple_count(pres: QuiverPresentation, dims, p: int) -> int:
    q = pres.quiver
    return p ** sum(dims[q.vertex_index[a.source]] * dims[q.vertex_index[a.target]] for a in q.arrows)


@dataclass(frozen=True)
class CorpusBlock:
    quiver: str
    dims: tuple
    p: int
    kind: str  # literal | orbit | jordan
    reps: tuple


def representations_of(pres: QuiverPresentation, dims, p: int, seed: int = 0) -> tuple[str, list]:
    dims = tuple(dims)
    if matrix_tuple_count(pres, dims, p) <= LITERAL_CAP:
        return "literal", literal_representations(pres, dims, p)
    m = _loop_power(pres)
    q = pres.quiver
    space = max((p ** (dims[q.vertex_index[a.source]] * dims[q.vertex_index[a.target]]) for a in q.arrows), default=1)
    if m is not None and space > ORBIT_SPACE_CAP:
        return "jordan", jordan_representatives(pres, dims[0], p, m)
    return "orbit", orbit_representatives(pres, dims, p, seed)


def dimension_vectors(n: int, max_total: int, min_total: int = 1):
    for total in range(min_total, max_total + 1):
        for dims in itertools.product(range(total + 1), repeat=n):
            if sum(dims) == total:
                yield dims


def build_corpus(names, p: int, max_total: int, seed: int = 0) -> list[CorpusBlock]:
    blocks = []
    for name in names:
        pres = bundled_presentation(name)
        for dims in dimension_vectors(len(pres.quiver.vertices), max_total):
            kind, reps = representations_of(pres, dims, p, seed)
            blocks.append(CorpusBlock(name, dims, p, kind, tuple(reps)))
    return blocks
