from fractions import Fraction as F

import pytest

from djets.dsl import parse_document, render_document
from djets.dvariety import validate_section
from djets.errors import ArityError, ParseError, UnknownName
from djets.mpoly import MPoly
from djets.series import exp_series

PLANE_DOC = """
dvariety X {
  vars: x, y;
  ideal: [];
  section: [x^2 - y^2, x^2 - x*y];
}
restrict toZ {
  x = y;
  delta x = 0;
}
point p on X { coords: [2, 1]; }
point flow on X { integrate from p; }
"""


def test_parse_plane_document_and_validate():
    doc = parse_document(PLANE_DOC)
    X = doc.variety("X")
    assert X.vars == ("x", "y")
    x = MPoly.variable(X.vars, "x")
    y = MPoly.variable(X.vars, "y")
    assert X.section[0] == x**2 - y**2
    assert X.section[1] == x**2 - x * y
    assert validate_section(X).ok


def test_empty_document_is_valid():
    doc = parse_document("")
    assert not doc.varieties and not doc.points


def test_section_arity_error():
    bad = """
    dvariety B { vars: x, y; ideal: []; section: [x^2]; }
    """
    with pytest.raises(ArityError):
        parse_document(bad)


def test_point_arity_error():
    bad = PLANE_DOC + "point q on X { coords: [1]; }"
    with pytest.raises(ArityError):
        parse_document(bad)


def test_unknown_variety_reference():
    with pytest.raises(UnknownName):
        parse_document("point p on nowhere { coords: [1]; }")


def test_unknown_variable_in_polynomial():
    with pytest.raises(UnknownName):
        parse_document("dvariety B { vars: x; ideal: [z]; section: [x]; }")


def test_parse_error_carries_location():
    with pytest.raises(ParseError) as info:
        parse_document("dvariety B { vars: x; ideal: [x +]; section: [x]; }")
    assert "line" in str(info.value)


def test_unexpected_character_rejected():
    with pytest.raises(ParseError):
        parse_document("dvariety B { vars: x; ideal: [x?]; section: [x]; }")


def test_rational_literals():
    doc = parse_document(
        "dvariety B { vars: x; ideal: []; section: [1/2*x - 3]; }"
    )
    B = doc.variety("B")
    x = MPoly.variable(("x",), "x")
    assert B.section[0] == F(1, 2) * x - 3


def test_restriction_binds_to_variables():
    doc = parse_document(PLANE_DOC)
    rules = doc.restriction("toZ").bind(("x", "y"))
    assert rules[0].kind == "identify" and rules[0].lhs == "x"
    assert rules[1].kind == "derivative" and rules[1].rhs.is_zero()
    with pytest.raises(UnknownName):
        doc.restriction("toZ").bind(("a", "b"))


def test_point_resolution_and_integration():
    doc = parse_document(PLANE_DOC)
    assert doc.rational_point("p") == (F(2), F(1))
    sharp = doc.sharp_point("flow", 8)
    assert sharp.coords[0].constant_term == 2


def test_integrate_chain_resolves_through_points():
    doc = parse_document(
        """
        dvariety L { vars: x; ideal: []; section: [x]; }
        point base on L { coords: [1]; }
        point once on L { integrate from base; }
        point twice on L { integrate from once; }
        """
    )
    sharp = doc.sharp_point("twice", 6)
    assert sharp.coords[0] == exp_series(1, 6)


def test_comments_are_ignored():
    doc = parse_document("# leading comment\n" + PLANE_DOC + "\n# trailing\n")
    assert "X" in doc.varieties


def test_round_trip_render_parse():
    doc = parse_document(PLANE_DOC)
    text = render_document(doc)
    again = parse_document(text)
    assert set(again.varieties) == set(doc.varieties)
    for name in doc.varieties:
        a, b = doc.variety(name), again.variety(name)
        assert a.vars == b.vars
        assert list(a.generators) == list(b.generators)
        assert list(a.section) == list(b.section)
    assert {
        name: (decl.coords, decl.integrate_from)
        for name, decl in doc.points.items()
    } == {
        name: (decl.coords, decl.integrate_from)
        for name, decl in again.points.items()
    }
    for name in doc.restrictions:
        bound_a = doc.restriction(name).bind(("x", "y"))
        bound_b = again.restriction(name).bind(("x", "y"))
        assert [(r.kind, r.lhs, r.rhs) for r in bound_a] == [
            (r.kind, r.lhs, r.rhs) for r in bound_b
        ]
