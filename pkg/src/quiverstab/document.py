"""The full description document: quiver, representations, Tor data, parameters, families.

Grammar (one statement per line, ``#`` comments)::

    vertices <id> ...
    arrow <id> <src> <tgt>
    relation <coef>*<path> [+|-] ...
    rep <name> p=<prime> dim <d1> <d2> ...
    mat <arrow> <r> <c>: <entries, row-major>        # belongs to the last rep
    tor gldim <g>
    tor_entry <l> <i> <j> <d>
    params [<name>] theta <q> ... lambda <q> ... xi <q> v <int> ...
    family <name> p=<prime>
    split <vertex> <ints>                             # belongs to the last family
    poly <arrow> <row> <col>: <coeffs of s^d ... t^d | polynomial>
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from . import representation as rp
from .errors import ParseError, QuiverStabError, SemanticError
from .families import FamilyOverP1, make_family
from .knum import TorTable
from .quiver import QuiverPresentation, _tokens, parse_presentation, strip_comment
from .stability import StabilityParams

SIGNED_RATIONAL = re.compile(r"-?\d+(/\d+)?\Z")
INT = re.compile(r"-?\d+\Z")


def parse_signed_rational(tok: str, lineno: int, col: int) -> Fraction:
    if not SIGNED_RATIONAL.match(tok) or tok.endswith("/0"):
        raise ParseError(f"expected a rational p/q, got '{tok}'", lineno, col)
    return Fraction(tok)


def _int(tok: str, lineno: int, col: int) -> int:
    if not INT.match(tok):
        raise ParseError(f"expected an integer, got '{tok}'", lineno, col)
    return int(tok)


def _prime_tok(tok: str, lineno: int, col: int) -> int:
    if not tok.startswith("p="):
        raise ParseError(f"expected 'p=<prime>', got '{tok}'", lineno, col)
    return _int(tok[2:], lineno, col + 2)


@dataclass
class Document:
    presentation: QuiverPresentation
    reps: dict = field(default_factory=dict)
    tor: TorTable | None = None
    params: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def default_params(self) -> StabilityParams | None:
        return next(iter(self.params.values()), None)


def _wrap(err: QuiverStabError, lineno: int, col: int = 1) -> ParseError:
    out = SemanticError(str(err), lineno, col)
    out.__cause__ = err
    return out


def parse_document(text: str) -> Document:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pres = parse_presentation(text)
    q = pres.quiver
    doc = Document(pres, warnings=[str(w.message) for w in caught])
    rep_blocks = []  # [name, p, dims, {arrow: rows}, lineno]
    fam_blocks = []  # [name, p, {vertex: ints}, {arrow: {(r,c): entry}}, lineno]
    tor_gldim = None
    tor_entries = {}
    tor_line = 0
    last = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        toks = list(_tokens(line))
        if not toks:
            continue
        kw, col = toks[0]
        if kw == "rep":
            if len(toks) < 4 or toks[3][0] != "dim":
                raise ParseError("expected 'rep <name> p=<prime> dim <d> ...'", lineno, col)
            name = toks[1][0]
            if any(b[0] == name for b in rep_blocks):
                raise SemanticError(f"duplicate rep {name}", lineno, toks[1][1])
            p = _prime_tok(toks[2][0], lineno, toks[2][1])
            dims = [_int(t, lineno, c) for t, c in toks[4:]]
            if len(dims) != len(q.vertices):
                raise SemanticError(f"rep {name} needs {len(q.vertices)} dimensions, got {len(dims)}", lineno, col)
            rep_blocks.append([name, p, dims, {}, lineno])
            last = "rep"
        elif kw == "mat":
            if last != "rep":
                raise ParseError("'mat' must follow a 'rep' line", lineno, col)
            head, sep, body = line.partition(":")
            htoks = list(_tokens(head))
            if not sep or len(htoks) != 4:
                raise ParseError("expected 'mat <arrow> <rows> <cols>: <entries>'", lineno, col)
            arrow = htoks[1][0]
            if arrow not in q.arrow_index:
                raise SemanticError(f"unknown arrow {arrow}", lineno, htoks[1][1])
            r, c = _int(htoks[2][0], lineno, htoks[2][1]), _int(htoks[3][0], lineno, htoks[3][1])
            off = len(head) + 1
            vals = [_int(t, lineno, off + cc) for t, cc in _tokens(body)]
            if len(vals) != r * c:
                raise SemanticError(f"mat {arrow}: {r}x{c} needs {r * c} entries, got {len(vals)}", lineno, col)
            rep_blocks[-1][3][arrow] = [vals[i * c : (i + 1) * c] for i in range(r)]
        elif kw == "tor":
            rest = [t for t, _ in toks[1:]]
            if rest and rest[0].startswith("gldim"):
                rest = [rest[0][len("gldim") :].lstrip("=")] + rest[1:] if rest[0] != "gldim" else rest[1:]
            if len(rest) != 1:
                raise ParseError("expected 'tor gldim <g>'", lineno, col)
            tor_gldim = _int(rest[0], lineno, col)
            tor_line = lineno
        elif kw == "tor_entry":
            if len(toks) != 5:
                raise ParseError("expected 'tor_entry <l> <i> <j> <d>'", lineno, col)
            l = _int(toks[1][0], lineno, toks[1][1])
            ij = []
            for t, c in toks[2:4]:
                if t not in q.vertex_index:
                    raise SemanticError(f"unknown vertex {t}", lineno, c)
                ij.append(q.vertex_index[t])
            d = _int(toks[4][0], lineno, toks[4][1])
            if l < 0 or d < 0:
                raise SemanticError("Tor degree and multiplicity must be nonnegative", lineno, col)
            key = (l, ij[0], ij[1])
            if l == 0 and d != int(ij[0] == ij[1]):
                raise SemanticError("degree-0 Tor multiplicities must be the identity", lineno, col)
            tor_entries[key] = d
        elif kw == "params":
            name, p = _parse_params(toks, lineno, len(q.vertices), len(doc.params))
            if name in doc.params:
                raise SemanticError(f"duplicate params {name}", lineno, col)
            doc.params[name] = p
        elif kw == "family":
            if len(toks) != 3:
                raise ParseError("expected 'family <name> p=<prime>'", lineno, col)
            name = toks[1][0]
            if any(b[0] == name for b in fam_blocks):
                raise SemanticError(f"duplicate family {name}", lineno, toks[1][1])
            fam_blocks.append([name, _prime_tok(toks[2][0], lineno, toks[2][1]), {}, {}, lineno])
            last = "family"
        elif kw == "split":
            if last != "family":
                raise ParseError("'split' must follow a 'family' line", lineno, col)
            if len(toks) < 2:
                raise ParseError("expected 'split <vertex> <ints>'", lineno, col)
            vert = toks[1][0]
            if vert not in q.vertex_index:
                raise SemanticError(f"unknown vertex {vert}", lineno, toks[1][1])
            fam_blocks[-1][2][vert] = [_int(t, lineno, c) for t, c in toks[2:]]
        elif kw == "poly":
            if last != "family":
                raise ParseError("'poly' must follow a 'family' line", lineno, col)
            head, sep, body = line.partition(":")
            htoks = list(_tokens(head))
            if not sep or len(htoks) != 4:
                raise ParseError("expected 'poly <arrow> <row> <col>: <coefficients>'", lineno, col)
            arrow = htoks[1][0]
            if arrow not in q.arrow_index:
                raise SemanticError(f"unknown arrow {arrow}", lineno, htoks[1][1])
            r, c = _int(htoks[2][0], lineno, htoks[2][1]), _int(htoks[3][0], lineno, htoks[3][1])
            body = body.strip()
            if not body:
                raise ParseError("missing polynomial", lineno, len(head) + 2)
            items = body.split()
            entry = [int(x) for x in items] if all(INT.match(x) for x in items) else body
            fam_blocks[-1][3].setdefault(arrow, {})[(r - 1, c - 1)] = entry
        elif kw in ("vertices", "arrow", "relation"):
            last = None
        else:  # parse_presentation has already rejected unknown keywords
            raise ParseError(f"unknown keyword '{kw}'", lineno, col)
    for name, p, dims, mats, lineno in rep_blocks:
        try:
            doc.reps[name] = rp.make_representation(pres, p, dims, mats)
        except (QuiverStabError, ValueError) as e:
            if isinstance(e, QuiverStabError):
                raise _wrap(e, lineno) from e
            raise SemanticError(str(e), lineno, 1) from e
    if tor_entries or tor_gldim is not None:
        gl = tor_gldim if tor_gldim is not None else max(k[0] for k in tor_entries)
        doc.tor = TorTable(len(q.vertices), gl, tor_entries)
        if doc.tor.truncated:
            doc.warnings.append(
                f"line {tor_line}: Tor entries above declared global dimension {gl} ignored: {list(doc.tor.dropped)}"
            )
    for name, p, split, polys, lineno in fam_blocks:
        try:
            doc.families[name] = make_family(pres, p, split, polys, name)
        except QuiverStabError as e:
            raise _wrap(e, lineno) from e
        except ValueError as e:
            raise SemanticError(str(e), lineno, 1) from e
    return doc


def _parse_params(toks, lineno, n, count) -> tuple[str, StabilityParams]:
    kw_col = toks[0][1]
    rest = toks[1:]
    name = f"params{count + 1}" if count else "default"
    if rest and rest[0][0] not in ("theta", "lambda", "xi", "v"):
        name = rest[0][0]
        rest = rest[1:]
    sections: dict = {}
    cur = None
    for t, c in rest:
        if t in ("theta", "lambda", "xi", "v"):
            if t in sections:
                raise ParseError(f"duplicate '{t}' in params", lineno, c)
            cur = t
            sections[t] = []
        elif cur is None:
            raise ParseError(f"unexpected token '{t}'", lineno, c)
        else:
            sections[cur].append((t, c))
    if "theta" not in sections or "v" not in sections:
        raise ParseError("params need at least 'theta' and 'v'", lineno, kw_col)
    theta = [parse_signed_rational(t, lineno, c) for t, c in sections["theta"]]
    lam = [parse_signed_rational(t, lineno, c) for t, c in sections.get("lambda", [])] or [Fraction(1)] * n
    xi_t = sections.get("xi", [("0", kw_col)])
    if len(xi_t) != 1:
        raise ParseError("'xi' takes exactly one rational", lineno, kw_col)
    xi = parse_signed_rational(xi_t[0][0], lineno, xi_t[0][1])
    v = [_int(t, lineno, c) for t, c in sections["v"]]
    for label, vec in (("theta", theta), ("lambda", lam), ("v", v)):
        if len(vec) != n:
            raise SemanticError(f"'{label}' needs {n} entries, got {len(vec)}", lineno, kw_col)
    try:
        return name, StabilityParams(tuple(theta), tuple(lam), xi, tuple(v))
    except QuiverStabError as e:
        raise _wrap(e, lineno, kw_col) from e


def load_document(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())


def render_family(fam: FamilyOverP1) -> str:
    """Family block in document syntax."""
    from .families import poly_str

    q = fam.presentation.quiver
    lines = [f"family {fam.name or 'fam'} p={fam.p}"]
    for v, s in zip(q.vertices, fam.split):
        if s:
            lines.append(f"split {v} " + " ".join(str(x) for x in s))
    for a, m in zip(q.arrows, fam.polys):
        for r, row in enumerate(m):
            for c, x in enumerate(row):
                if x:
                    lines.append(f"poly {a.name} {r + 1} {c + 1}: {poly_str(x)}")
    return "\n".join(lines) + "\n"
