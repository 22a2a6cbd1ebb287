"""Quivers with relations and their path combinatorics.

Paths are stored in traversal order (the first arrow applied comes first) but
written right-to-left: ``g*f`` means "f, then g", matching the left-module
convention in which a path acts on a representation as ``M_g @ M_f``.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .errors import CapExceeded, ParseError, SemanticError

DEFAULT_PATH_CAP = 10_000

ARROW_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
RATIONAL = re.compile(r"\d+(/\d+)?\Z")

# keywords owned by other blocks of a description document
FOREIGN_KEYWORDS = frozenset({"rep", "mat", "tor", "tor_entry", "params", "family", "split", "poly"})


class LengthOneRelationWarning(UserWarning):
    """A relation contains a single arrow; it effectively deletes that arrow."""


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Path:
    """A path from ``source`` to ``target``; ``arrows`` empty means the idempotent e_source."""

    source: str
    target: str
    arrows: tuple[str, ...] = ()

    @property
    def length(self) -> int:
        return len(self.arrows)

    def __str__(self) -> str:
        if not self.arrows:
            return f"e_{self.source}"
        return "*".join(reversed(self.arrows))


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        if not self.vertices:
            raise ValueError("a quiver needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex identifiers")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise ValueError("duplicate arrow identifiers")
        known = set(self.vertices)
        for a in self.arrows:
            for end in (a.source, a.target):
                if end not in known:
                    raise ValueError(f"unknown vertex {end}")

    @classmethod
    def build(cls, vertices, arrows) -> "Quiver":
        """``arrows`` is an iterable of ``(name, source, target)`` triples."""
        return cls(tuple(str(v) for v in vertices), tuple(Arrow(str(n), str(s), str(t)) for n, s, t in arrows))

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def arrow_index(self) -> dict[str, int]:
        return {a.name: i for i, a in enumerate(self.arrows)}

    def arrow(self, name: str) -> Arrow:
        return self.arrows[self.arrow_index[name]]

    def outgoing(self, vertex: str) -> list[Arrow]:
        return [a for a in self.arrows if a.source == vertex]

    def path(self, arrows, source: str | None = None) -> Path:
        """Build a path from arrow names in traversal order, checking composability."""
        arrows = tuple(arrows)
        if not arrows:
            if source is None:
                raise ValueError("trivial path needs a source vertex")
            return Path(source, source, ())
        first = self.arrow(arrows[0])
        cur = first.target
        for name in arrows[1:]:
            a = self.arrow(name)
            if a.source != cur:
                raise ValueError(f"arrow {name} starts at {a.source}, not at {cur}")
            cur = a.target
        return Path(first.source, cur, arrows)


@dataclass(frozen=True)
class Relation:
    """A linear combination of parallel paths, each of length >= 1."""

    terms: tuple[tuple[Fraction, Path], ...]

    def __post_init__(self):
        terms = tuple((Fraction(c), pth) for c, pth in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("empty relation")
        ends = {(pth.source, pth.target) for _, pth in terms}
        if len(ends) != 1:
            raise ValueError("relation terms are not parallel")
        if any(pth.length == 0 for _, pth in terms):
            raise ValueError("relation paths must have length >= 1")

    @property
    def source(self) -> str:
        return self.terms[0][1].source

    @property
    def target(self) -> str:
        return self.terms[0][1].target

    def __str__(self) -> str:
        return render_relation(self)


@dataclass(frozen=True)
class QuiverPresentation:
    quiver: Quiver
    relations: tuple[Relation, ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        q = self.quiver
        for rel in self.relations:
            for _, pth in rel.terms:
                q.path(pth.arrows)  # raises on invalid paths

    @property
    def n(self) -> int:
        return len(self.quiver.vertices)


def is_acyclic(q: Quiver) -> bool:
    """Kahn's topological sort; loops and longer cycles both make it fail."""
    indeg = {v: 0 for v in q.vertices}
    for a in q.arrows:
        indeg[a.target] += 1
    ready = [v for v in q.vertices if indeg[v] == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for a in q.outgoing(v):
            indeg[a.target] -= 1
            if indeg[a.target] == 0:
                ready.append(a.target)
    return seen == len(q.vertices)


def enumerate_paths(q: Quiver, source: str, max_len: int, cap: int = DEFAULT_PATH_CAP) -> list[Path]:
    """All paths starting at ``source`` of length <= max_len.

    Sorted by length, then lexicographically by the arrow sequence in
    traversal order.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    if source not in q.vertex_index:
        raise ValueError(f"unknown vertex {source}")
    out = [Path(source, source, ())]
    frontier = [out[0]]
    for _ in range(max_len):
        nxt = []
        for pth in frontier:
            for a in sorted(q.outgoing(pth.target), key=lambda a: a.name):
                nxt.append(Path(source, a.target, pth.arrows + (a.name,)))
                if len(out) + len(nxt) > cap:
                    raise CapExceeded(f"more than {cap} paths from {source}", partial=len(out) + len(nxt))
        if not nxt:
            break
        nxt.sort(key=lambda t: t.arrows)
        out.extend(nxt)
        frontier = nxt
    return out


def all_paths_acyclic(q: Quiver, source: str) -> list[Path]:
    """Complete path list from ``source`` for an acyclic quiver."""
    if not is_acyclic(q):
        raise ValueError("quiver has cycles; the path set is infinite")
    return enumerate_paths(q, source, len(q.vertices))


# ---------------------------------------------------------------- parsing


def _tokens(line: str):
    """Yield (token, 1-based column) pairs."""
    for m in re.finditer(r"\S+", line):
        yield m.group(0), m.start() + 1


def strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_rational(tok: str) -> Fraction:
    if not RATIONAL.match(tok):
        raise ValueError(tok)
    num, _, den = tok.partition("/")
    if den and int(den) == 0:
        raise ValueError(tok)
    return Fraction(int(num), int(den) if den else 1)


def _parse_relation(body: str, offset: int, lineno: int, q: Quiver) -> Relation:
    terms = []
    expect_term = True
    sign = None
    for m in re.finditer(r"[+-]|[^\s+-]+", body):
        tok, col = m.group(0), offset + m.start()
        if tok in "+-":
            if sign is not None:
                raise ParseError(f"unexpected '{tok}'", lineno, col)
            sign = 1 if tok == "+" else -1
            expect_term = True
            continue
        if not expect_term:
            raise ParseError(f"expected '+' or '-' before '{tok}'", lineno, col)
        factors = tok.split("*")
        coef = Fraction(1)
        if RATIONAL.match(factors[0]):
            try:
                coef = parse_rational(factors[0])
            except ValueError:
                raise ParseError(f"bad coefficient '{factors[0]}'", lineno, col) from None
            factors = factors[1:]
        if not factors or any(f == "" for f in factors):
            raise ParseError(f"malformed term '{tok}'", lineno, col)
        for f in factors:
            if not ARROW_ID.match(f):
                raise ParseError(f"bad arrow identifier '{f}'", lineno, col)
            if f not in q.arrow_index:
                raise SemanticError(f"unknown arrow {f}", lineno, col)
        try:
            pth = q.path(tuple(reversed(factors)))
        except ValueError as e:
            raise SemanticError(f"path '{tok}' does not compose: {e}", lineno, col) from None
        terms.append(((sign or 1) * coef, pth))
        sign = None
        expect_term = False
    if not terms:
        raise ParseError("relation has no terms", lineno, offset)
    if sign is not None:
        raise ParseError("dangling sign at end of relation", lineno, offset + len(body))
    for _, pth in terms:
        if pth.length == 0:
            raise SemanticError("relation paths must have length >= 1", lineno, offset)
    ends = {(pth.source, pth.target) for _, pth in terms}
    if len(ends) != 1:
        raise SemanticError("relation terms are not parallel", lineno, offset)
    return Relation(tuple(terms))


def parse_presentation(text: str) -> QuiverPresentation:
    """Parse the quiver part of a description document.

    Lines belonging to other blocks (``rep``, ``family``, ...) are skipped
    here; see :mod:`quiverstab.document` for the full document.
    """
    vertices = None
    arrow_lines = []
    relation_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        toks = list(_tokens(line))
        if not toks:
            continue
        kw, col = toks[0]
        if kw == "vertices":
            if vertices is not None:
                raise ParseError("duplicate 'vertices' line", lineno, col)
            ids = [t for t, _ in toks[1:]]
            if not ids:
                raise ParseError("'vertices' needs at least one identifier", lineno, col)
            seen = set()
            for t, c in toks[1:]:
                if t in seen:
                    raise SemanticError(f"duplicate vertex {t}", lineno, c)
                seen.add(t)
            vertices = (ids, lineno)
        elif kw == "arrow":
            if len(toks) != 4:
                raise ParseError("expected 'arrow <id> <source> <target>'", lineno, col)
            arrow_lines.append((toks, lineno))
        elif kw == "relation":
            relation_lines.append((line, toks, lineno))
        elif kw in FOREIGN_KEYWORDS:
            continue
        else:
            raise ParseError(f"unknown keyword '{kw}'", lineno, col)
    if vertices is None:
        raise ParseError("missing 'vertices' line", 1, 1)
    ids = vertices[0]
    known = set(ids)
    arrows = []
    names = set()
    for toks, lineno in arrow_lines:
        (_, _), (name, ncol), (src, scol), (tgt, tcol) = toks
        if not ARROW_ID.match(name):
            raise ParseError(f"bad arrow identifier '{name}'", lineno, ncol)
        if name in names:
            raise SemanticError(f"duplicate arrow {name}", lineno, ncol)
        for v, c in ((src, scol), (tgt, tcol)):
            if v not in known:
                raise SemanticError(f"unknown vertex {v}", lineno, c)
        names.add(name)
        arrows.append(Arrow(name, src, tgt))
    q = Quiver(tuple(ids), tuple(arrows))
    relations = []
    notes = []
    for line, toks, lineno in relation_lines:
        start = toks[0][1] + len("relation")
        rel = _parse_relation(line[start - 1:], start, lineno, q)
        if any(pth.length == 1 for _, pth in rel.terms):
            msg = f"line {lineno}: relation '{render_relation(rel)}' has a length-1 term and deletes an arrow"
            warnings.warn(msg, LengthOneRelationWarning, stacklevel=2)
            notes.append(msg)
        relations.append(rel)
    return QuiverPresentation(q, tuple(relations), tuple(notes))


def _render_coef(c: Fraction) -> str:
    c = abs(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_relation(rel: Relation) -> str:
    parts = []
    for k, (c, pth) in enumerate(rel.terms):
        word = str(pth)
        body = word if abs(c) == 1 else f"{_render_coef(c)}*{word}"
        if k == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def render_presentation(pres: QuiverPresentation) -> str:
    """Serialize to the description-document grammar; inverse of :func:`parse_presentation`."""
    q = pres.quiver
    lines = ["vertices " + " ".join(q.vertices)]
    lines += [f"arrow {a.name} {a.source} {a.target}" for a in q.arrows]
    lines += ["relation " + render_relation(r) for r in pres.relations]
    return "\n".join(lines) + "\n"
