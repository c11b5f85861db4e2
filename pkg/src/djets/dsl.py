"""The small input language for D-varieties, restrictions, and points.

    dvariety X {
      vars: x, y;
      ideal: [];
      section: [x^2 - y^2, x^2 - x*y];
    }
    restrict toZ { x = y; delta x = 0; }
    point p on X { coords: [2, 1]; }
    point sp on X { integrate from p; }

Polynomial expressions use explicit `*` and `^` with integer or p/q
rational literals.  Restriction rules are parsed to expression trees and
bound to a concrete variety's variables at the point of use, so one
restriction block can serve any variety that declares the names it uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dvariety import DVariety, sharp_integrate
from .errors import ArityError, ParseError, UnknownName
from .mpoly import MPoly
from .tangent import RestrictionRule


# -- tokens ----------------------------------------------------------------------

_PUNCT = set("{}[]():;,=^*+-/")


@dataclass
class Token:
    kind: str  # "name" | "int" | punctuation literal
    text: str
    line: int
    col: int


def tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT:
            tokens.append(Token(ch, ch, line, col))
            col += 1
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    return tokens


# -- expression trees --------------------------------------------------------------


def bind_expression(ast, variables):
    """Build an MPoly over the given variable tuple from an expression tree."""
    kind = ast[0]
    if kind == "num":
        return MPoly.constant(variables, ast[1])
    if kind == "var":
        if ast[1] not in variables:
            raise UnknownName(f"unknown variable {ast[1]!r}")
        return MPoly.variable(variables, ast[1])
    if kind == "neg":
        return -bind_expression(ast[1], variables)
    if kind == "pow":
        return bind_expression(ast[1], variables) ** ast[2]
    left = bind_expression(ast[1], variables)
    right = bind_expression(ast[2], variables)
    if kind == "add":
        return left + right
    if kind == "sub":
        return left - right
    if kind == "mul":
        return left * right
    raise ParseError(f"malformed expression node {kind!r}")


def expression_names(ast):
    kind = ast[0]
    if kind == "num":
        return set()
    if kind == "var":
        return {ast[1]}
    if kind == "neg":
        return expression_names(ast[1])
    if kind == "pow":
        return expression_names(ast[1])
    return expression_names(ast[1]) | expression_names(ast[2])


# -- document objects ----------------------------------------------------------------


@dataclass
class RestrictionDecl:
    name: str
    rules: list  # ("identify" | "derivative", lhs name, expr ast)

    def bind(self, variables):
        out = []
        for kind, lhs, ast in self.rules:
            if lhs not in variables:
                raise UnknownName(
                    f"restriction {self.name!r} mentions unknown variable {lhs!r}"
                )
            rhs = bind_expression(ast, variables)
            out.append(
                RestrictionRule(
                    "identify" if kind == "identify" else "derivative", lhs, rhs
                )
            )
        return out


@dataclass
class PointDecl:
    name: str
    variety: str
    coords: tuple | None = None
    integrate_from: str | None = None


@dataclass
class DslDocument:
    varieties: dict = field(default_factory=dict)
    restrictions: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)

    def variety(self, name):
        if name not in self.varieties:
            raise UnknownName(f"unknown dvariety {name!r}")
        return self.varieties[name]

    def restriction(self, name):
        if name not in self.restrictions:
            raise UnknownName(f"unknown restriction {name!r}")
        return self.restrictions[name]

    def point(self, name):
        if name not in self.points:
            raise UnknownName(f"unknown point {name!r}")
        return self.points[name]

    def rational_point(self, name):
        """Resolve a point's rational coordinates, following integrate chains."""
        decl = self.point(name)
        if decl.coords is not None:
            return decl.coords
        return self.rational_point(decl.integrate_from)

    def sharp_point(self, name, order):
        """A series point on the named point's variety, integrated from its
        rational coordinates."""
        decl = self.point(name)
        variety = self.variety(decl.variety)
        coords = self.rational_point(name)
        return sharp_integrate(variety, coords, order)


# -- parser ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            raise ParseError(
                "unexpected end of input",
                last.line if last else 1,
                last.col if last else 1,
            )
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def expect_name(self, text=None):
        tok = self.expect("name")
        if text is not None and tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    # expressions: expr := term (('+'|'-') term)* ; term := factor ('*' factor)*
    # factor := '-' factor | atom ('^' int)? ; atom := rational | name | '(' expr ')'
    def parse_expr(self):
        node = self.parse_term()
        while self.peek() and self.peek().kind in "+-":
            op = self.next().kind
            right = self.parse_term()
            node = ("add" if op == "+" else "sub", node, right)
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek() and self.peek().kind == "*":
            self.next()
            node = ("mul", node, self.parse_factor())
        return node

    def parse_factor(self):
        tok = self.peek()
        if tok and tok.kind == "-":
            self.next()
            return ("neg", self.parse_factor())
        node = self.parse_atom()
        if self.peek() and self.peek().kind == "^":
            self.next()
            power = self.expect("int")
            node = ("pow", node, int(power.text))
        return node

    def parse_atom(self):
        tok = self.next()
        if tok.kind == "int":
            value = Fraction(int(tok.text))
            if self.peek() and self.peek().kind == "/":
                self.next()
                den = self.expect("int")
                if int(den.text) == 0:
                    raise ParseError("zero denominator", den.line, den.col)
                value = Fraction(int(tok.text), int(den.text))
            return ("num", value)
        if tok.kind == "name":
            return ("var", tok.text)
        if tok.kind == "(":
            node = self.parse_expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.col)

    def parse_rational(self):
        sign = 1
        if self.peek() and self.peek().kind == "-":
            self.next()
            sign = -1
        tok = self.expect("int")
        value = Fraction(int(tok.text))
        if self.peek() and self.peek().kind == "/":
            self.next()
            den = self.expect("int")
            if int(den.text) == 0:
                raise ParseError("zero denominator", den.line, den.col)
            value = Fraction(int(tok.text), int(den.text))
        return sign * value


def parse_document(text):
    """Parse a whole document and run the cross-reference and arity checks."""
    parser = _Parser(tokenize(text))
    doc = DslDocument()
    while parser.peek() is not None:
        tok = parser.expect("name")
        if tok.text == "dvariety":
            _parse_dvariety(parser, doc)
        elif tok.text == "restrict":
            _parse_restrict(parser, doc)
        elif tok.text == "point":
            _parse_point(parser, doc)
        else:
            raise ParseError(
                f"expected dvariety, restrict, or point, found {tok.text!r}",
                tok.line,
                tok.col,
            )
    _validate(doc)
    return doc


def _parse_dvariety(parser, doc):
    name = parser.expect("name").text
    parser.expect("{")
    variables = None
    ideal_asts = None
    section_asts = None
    while parser.peek() and parser.peek().kind != "}":
        key = parser.expect("name")
        parser.expect(":")
        if key.text == "vars":
            variables = [parser.expect("name").text]
            while parser.peek() and parser.peek().kind == ",":
                parser.next()
                variables.append(parser.expect("name").text)
        elif key.text == "ideal":
            ideal_asts = _parse_expr_list(parser)
        elif key.text == "section":
            section_asts = _parse_expr_list(parser)
        else:
            raise ParseError(
                f"unknown dvariety field {key.text!r}", key.line, key.col
            )
        parser.expect(";")
    parser.expect("}")
    if variables is None:
        raise ParseError(f"dvariety {name!r} lacks a vars declaration")
    if section_asts is None:
        raise ParseError(f"dvariety {name!r} lacks a section declaration")
    variables = tuple(variables)
    if len(section_asts) != len(variables):
        raise ArityError(
            f"dvariety {name!r}: section has {len(section_asts)} components "
            f"for {len(variables)} variables"
        )
    generators = tuple(bind_expression(a, variables) for a in (ideal_asts or []))
    section = tuple(bind_expression(a, variables) for a in section_asts)
    doc.varieties[name] = DVariety(variables, generators, section, name=name)


def _parse_expr_list(parser):
    parser.expect("[")
    items = []
    if parser.peek() and parser.peek().kind != "]":
        items.append(parser.parse_expr())
        while parser.peek() and parser.peek().kind == ",":
            parser.next()
            items.append(parser.parse_expr())
    parser.expect("]")
    return items


def _parse_restrict(parser, doc):
    name = parser.expect("name").text
    parser.expect("{")
    rules = []
    while parser.peek() and parser.peek().kind != "}":
        first = parser.expect("name")
        if first.text == "delta":
            lhs = parser.expect("name").text
            parser.expect("=")
            rules.append(("derivative", lhs, parser.parse_expr()))
        else:
            parser.expect("=")
            rules.append(("identify", first.text, parser.parse_expr()))
        parser.expect(";")
    parser.expect("}")
    doc.restrictions[name] = RestrictionDecl(name, rules)


def _parse_point(parser, doc):
    name = parser.expect("name").text
    parser.expect_name("on")
    variety = parser.expect("name").text
    parser.expect("{")
    coords = None
    integrate_from = None
    while parser.peek() and parser.peek().kind != "}":
        key = parser.expect("name")
        if key.text == "coords":
            parser.expect(":")
            parser.expect("[")
            coords = [parser.parse_rational()]
            while parser.peek() and parser.peek().kind == ",":
                parser.next()
                coords.append(parser.parse_rational())
            parser.expect("]")
        elif key.text == "integrate":
            parser.expect_name("from")
            integrate_from = parser.expect("name").text
        else:
            raise ParseError(f"unknown point field {key.text!r}", key.line, key.col)
        parser.expect(";")
    parser.expect("}")
    if coords is None and integrate_from is None:
        raise ParseError(f"point {name!r} needs coords or integrate from")
    doc.points[name] = PointDecl(
        name, variety, tuple(coords) if coords else None, integrate_from
    )


def _validate(doc):
    for pname, decl in doc.points.items():
        if decl.variety not in doc.varieties:
            raise UnknownName(
                f"point {pname!r} references unknown dvariety {decl.variety!r}"
            )
        variety = doc.varieties[decl.variety]
        if decl.coords is not None and len(decl.coords) != variety.nvars:
            raise ArityError(
                f"point {pname!r} has {len(decl.coords)} coordinates for "
                f"{variety.nvars} variables"
            )
        if decl.integrate_from is not None:
            if decl.integrate_from not in doc.points:
                raise UnknownName(
                    f"point {pname!r} integrates from unknown point "
                    f"{decl.integrate_from!r}"
                )
    # catch integrate-from cycles
    for pname in doc.points:
        seen = set()
        cur = pname
        while doc.points[cur].integrate_from is not None:
            if cur in seen:
                raise UnknownName(f"point {pname!r} has a cyclic integrate chain")
            seen.add(cur)
            cur = doc.points[cur].integrate_from


def render_document(doc: DslDocument):
    """Print a document back to parsable text (round-trip check support)."""
    lines = []
    for name, variety in doc.varieties.items():
        lines.append(f"dvariety {name} {{")
        lines.append(f"  vars: {', '.join(variety.vars)};")
        lines.append(
            "  ideal: [" + ", ".join(str(p) for p in variety.generators) + "];"
        )
        lines.append(
            "  section: [" + ", ".join(str(p) for p in variety.section) + "];"
        )
        lines.append("}")
    for name, decl in doc.restrictions.items():
        lines.append(f"restrict {name} {{")
        for kind, lhs, ast in decl.rules:
            names = sorted(expression_names(ast))
            rhs = bind_expression(ast, tuple(names) if names else ("_",))
            if kind == "identify":
                lines.append(f"  {lhs} = {rhs};")
            else:
                lines.append(f"  delta {lhs} = {rhs};")
        lines.append("}")
    for name, decl in doc.points.items():
        if decl.coords is not None:
            coords = ", ".join(str(c) for c in decl.coords)
            lines.append(f"point {name} on {decl.variety} {{ coords: [{coords}]; }}")
        else:
            lines.append(
                f"point {name} on {decl.variety} "
                f"{{ integrate from {decl.integrate_from}; }}"
            )
    return "\n".join(lines) + "\n"
