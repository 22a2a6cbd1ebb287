from __future__ import annotations

from fractions import Fraction

import pytest

from quiverstab import corpus
from quiverstab.document import load_document, parse_document, render_family
from quiverstab.errors import ParseError, RelationError, SemanticError

from conftest import K2_TEXT


def test_bundled_documents_parse():
    for fname in set(corpus.BUNDLED_QUIVERS.values()) | set(corpus.BUNDLED_FAMILY_FILES):
        doc = corpus.bundled_document(fname)
        assert doc.presentation.quiver.vertices


def test_k2_document(tmp_path):
    path = tmp_path / "k2.qv"
    path.write_text(corpus.data_path("k2.qv").read_text())
    doc = load_document(path)
    assert set(doc.reps) == {"m10", "m01", "zero11"}
    assert doc.reps["m10"].mats == (((1,),), ((0,),))
    assert doc.reps["zero11"].mats == (((0,),), ((0,),))
    params = doc.default_params()
    assert params.theta == (-1, 1) and params.lam == (1, 1) and params.xi == 0 and params.v == (1, 1)


def test_params_syntax():
    doc = parse_document(K2_TEXT + "params named theta -1/2 1/2 lambda 2 3/4 xi -1/3 v 1 1\n")
    p = doc.params["named"]
    assert p.theta == (Fraction(-1, 2), Fraction(1, 2))
    assert p.lam == (2, Fraction(3, 4)) and p.xi == Fraction(-1, 3)


@pytest.mark.parametrize(
    "extra,line,col,kind",
    [
        ("rep r p=2 dim 1\n", None, 1, SemanticError),
        ("rep r p=4 dim 1 1\n", None, 1, SemanticError),
        ("mat a 1 1: 1\n", None, 1, ParseError),
        ("rep r p=2 dim 1 1\nmat z 1 1: 1\n", "+1", 5, SemanticError),
        ("rep r p=2 dim 1 1\nmat a 1 1: 1 1\n", "+1", 1, SemanticError),
        ("params theta 1 1 v 1 1\n", None, 1, SemanticError),
        ("params theta -1 1 lambda 0 1 v 1 1\n", None, 1, ParseError),
        ("params theta -1 x v 1 1\n", None, 17, ParseError),
        ("frobnicate\n", None, 1, ParseError),
        ("family f p=3\nsplit 7 0\n", "+1", 7, SemanticError),
        ("family f p=3\nsplit 1 0\npoly a 1 1: 1\n", None, 1, SemanticError),
    ],
)
def test_errors_carry_positions(extra, line, col, kind):
    base = len(K2_TEXT.splitlines())
    with pytest.raises(kind) as info:
        parse_document(K2_TEXT + extra)
    err = info.value
    if line is None:
        assert err.line == base + 1
    elif line == "+1":
        assert err.line == base + 2
    if col is not None:
        assert err.column == col


def test_relation_violation_is_reported_with_line():
    text = "vertices 1\narrow x 1 1\nrelation x*x\nrep r p=2 dim 1\nmat x 1 1: 1\n"
    with pytest.raises(ParseError) as info:
        parse_document(text)
    assert info.value.line == 4
    assert isinstance(info.value.__cause__, RelationError)


def test_tor_truncation_warning():
    text = corpus.data_path("loop_x2.qv").read_text().replace("tor gldim 2", "tor gldim 1")
    doc = parse_document(text)
    assert doc.tor.truncated
    assert any("ignored" in w for w in doc.warnings)


@pytest.mark.parametrize("fname", corpus.BUNDLED_FAMILY_FILES)
def test_family_render_round_trip(fname):
    doc = corpus.bundled_document(fname)
    from quiverstab.quiver import render_presentation

    for fam in doc.families.values():
        again = parse_document(render_presentation(doc.presentation) + "\n" + render_family(fam))
        (fam2,) = again.families.values()
        assert fam2.split == fam.split and fam2.polys == fam.polys and fam2.p == fam.p


def test_degree_pattern_is_checked_lazily():
    from quiverstab import families as fm
    from quiverstab.errors import DegreeError

    doc = parse_document(K2_TEXT + "family f p=3\nsplit 1 0\nsplit 2 1\npoly a 1 1: 1 0 0\n")
    with pytest.raises(DegreeError):
        fm.check_structure(doc.families["f"])
