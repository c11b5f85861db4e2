"""Algebraic D-varieties and their differential jet spaces.

A D-variety is an affine variety together with a polynomial section of its
prolongation: generators P(x) = 0 plus a tuple s = (s_1..s_n) with the
property that each sum_j dP/dx_j * s_j lies back in the ideal.  Its sharp
points are the series solutions of x' = s(x) starting on the variety; at
such a point the section induces a derivation d on the truncated local
algebra by

    d(f) = delta(coefficients of f) + sum_j (s_j(x) - s_j(a)) * df/dx_j

and the differential jet space is the kernel of the dual operator D inside
the algebraic jet space.  Its horizontal basis is computed by restricting
the coordinate ODE v' = B v to the jet kernel and solving with a
fundamental matrix, so the dimension over the constants automatically
matches the jet dimension over the series field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ArityError,
    DimensionMismatch,
    InvarianceViolation,
    NonTriangular,
    PointNotOnVariety,
)
from .jets import JetIndexSet, JetSpace, jet_space
from .linalg import RATIONAL
from .mpoly import MPoly, multi_indices, taylor_coeffs
from .series import TSeries, fundamental_matrix
from . import diffpoly as dp


@dataclass(frozen=True)
class DVariety:
    """Ambient variables, ideal generators, and a section of the prolongation."""

    vars: tuple
    generators: tuple
    section: tuple
    name: str = ""

    def __post_init__(self):
        if len(self.section) != len(self.vars):
            raise ArityError(
                f"section has {len(self.section)} components for "
                f"{len(self.vars)} variables"
            )
        for p in tuple(self.generators) + tuple(self.section):
            if p.vars != tuple(self.vars):
                raise DimensionMismatch("polynomial over the wrong variable tuple")

    @property
    def nvars(self):
        return len(self.vars)


def prolongation(variety: DVariety):
    """Equations of the prolongation in variables (x, u_x).

    Each generator P contributes P itself and the linearization
    sum_j dP/dx_j(x) * u_j; coefficients are rational constants so no
    extra coefficient-derivative term appears.
    """
    fiber = tuple("u_" + v for v in variety.vars)
    allvars = tuple(variety.vars) + fiber
    out = []
    for P in variety.generators:
        out.append(P.embed(allvars))
        lin = MPoly.zero(allvars)
        for v, uv in zip(variety.vars, fiber):
            lin = lin + P.partial(v).embed(allvars) * MPoly.variable(allvars, uv)
        out.append(lin)
    return out


@dataclass
class SectionValidation:
    ok: bool
    exact: bool
    residuals: list
    sampled_points: int = 0


def _triangular_rules(variety: DVariety):
    """Orient generators of the shape  x_k - g(других)  as rewrite rules.

    Returns a SubstitutionSystem over the ambient variables, or raises
    NonTriangular when some generator cannot be oriented.
    """
    remaining = list(variety.generators)
    rules = []
    eliminated = set()
    progress = True
    while remaining and progress:
        progress = False
        for P in list(remaining):
            oriented = _orient(P, variety.vars, eliminated)
            if oriented is not None:
                j, rhs = oriented
                rules.append((j, rhs))
                eliminated.add(j)
                remaining.remove(P)
                progress = True
    if remaining:
        raise NonTriangular(
            f"generators not triangular: {[str(p) for p in remaining]}"
        )
    # Triangularity of SubstitutionSystem wants each rhs to avoid variables
    # eliminated at-or-before its own rule, so emit in reverse discovery order.
    rules.reverse()
    return dp.SubstitutionSystem(tuple(variety.vars), {}, tuple(rules))


def _orient(P, variables, already):
    """Try to solve P = 0 for a variable occurring linearly with constant coefficient."""
    for j, v in enumerate(variables):
        if j in already:
            continue
        unit = [0] * len(variables)
        unit[j] = 1
        coeff = Fraction(0)
        rest = {}
        usable = True
        for e, c in P.terms.items():
            if e[j] == 0:
                rest[e] = c
            elif e[j] == 1 and sum(e) == 1:
                if not isinstance(c, Fraction):
                    usable = False
                    break
                coeff += c
            else:
                usable = False
                break
        if not usable or coeff == 0:
            continue
        rhs = MPoly(variables, {e: -c / coeff for e, c in rest.items()})
        if rhs.mentions(v):
            continue
        return j, rhs
    return None


def validate_section(variety: DVariety, samples=()):
    """Check that the section lands in the prolongation over the variety.

    For each generator P the residual E_P = sum_j dP/dx_j * s_j must lie in
    the ideal.  Membership is decided exactly by triangular reduction when
    the generators can be oriented as rewrite rules; otherwise the residuals
    are tested at the supplied sample points (sharp or plain) and the result
    is flagged as sampled-only.  With no generators the check is vacuous.
    """
    residuals = []
    for P in variety.generators:
        E = MPoly.zero(variety.vars)
        for v, s in zip(variety.vars, variety.section):
            E = E + P.partial(v) * s
        residuals.append(E)
    if not residuals:
        return SectionValidation(True, True, [])
    try:
        system = _triangular_rules(variety)
    except NonTriangular:
        if not samples:
            raise
        ok = True
        for E in residuals:
            for pt in samples:
                if E.eval(pt) != 0:
                    ok = False
        return SectionValidation(ok, False, residuals, sampled_points=len(samples))
    reduced = [dp.reduce(dp.DiffPoly.from_mpoly(E), system) for E in residuals]
    ok = all(r.is_zero() for r in reduced)
    return SectionValidation(ok, True, reduced)


@dataclass
class SharpPoint:
    """A series solution of x' = s(x) staying on the variety."""

    variety: DVariety
    coords: tuple
    initial: tuple

    @property
    def prec(self):
        return min(c.prec for c in self.coords)


def sharp_integrate(variety: DVariety, initial, order):
    """Integrate x' = s(x) from a rational point of the variety.

    Standard Taylor recursion: coefficient k+1 of each coordinate is the
    k-th coefficient of s evaluated at the truncation so far, divided by
    k+1.  The defining equations are re-checked on the resulting series to
    guaranteed precision.
    """
    initial = tuple(Fraction(c) for c in initial)
    if len(initial) != variety.nvars:
        raise DimensionMismatch("initial point arity mismatch")
    for P in variety.generators:
        val = P.eval(initial)
        if val != 0:
            raise PointNotOnVariety(f"{P} evaluates to {val} at {initial}")
    coeffs = [[c] for c in initial]
    for k in range(order):
        truncated = [TSeries(cs, k) for cs in coeffs]
        for j, s in enumerate(variety.section):
            value = s.eval(truncated)
            if not isinstance(value, TSeries):
                value = TSeries.constant(value, k)
            coeffs[j].append(value.coeffs[k] / (k + 1))
    point = tuple(TSeries(cs, order) for cs in coeffs)
    for P in variety.generators:
        val = P.eval(point)
        if val != 0:
            raise PointNotOnVariety(
                f"integrated point leaves the variety: {P} -> {val}"
            )
    return SharpPoint(variety, point, initial)


def constant_sharp_point(variety: DVariety, initial, order):
    """The constant solution at an equilibrium or of a zero section."""
    return sharp_integrate(variety, initial, order)


def _derivation_matrix(variety: DVariety, point: SharpPoint, order_m):
    """Matrix B of the induced derivation on the ambient monomial basis.

    Row alpha holds the coordinates of d((x-a)^alpha) on the basis
    (x-a)^beta, beta in Lambda, using d(x_j - a_j) = Taylor expansion of
    s_j(x) - s_j(a) around a, truncated past order m.
    """
    lam = JetIndexSet.build(variety.nvars, order_m)
    pos = {alpha: i for i, alpha in enumerate(lam.indices)}
    prec = point.prec
    zero = TSeries.zero(prec)
    # Taylor data of each section component around the moving point; the
    # constant term cancels in s_j(x) - s_j(a).
    tails = []
    for s in variety.section:
        coeffs = dict(taylor_coeffs(s, point.coords, order_m))
        coeffs.pop((0,) * variety.nvars, None)
        tails.append(coeffs)
    size = len(lam)
    B = [[zero for _ in range(size)] for _ in range(size)]
    for alpha in lam.indices:
        row = B[pos[alpha]]
        for j in range(variety.nvars):
            if alpha[j] == 0:
                continue
            lowered = list(alpha)
            lowered[j] -= 1
            for beta, value in tails[j].items():
                combined = tuple(l + b for l, b in zip(lowered, beta))
                if 0 < sum(combined) <= order_m:
                    target = pos[combined]
                    row[target] = row[target] + alpha[j] * value
    return B, lam


@dataclass
class DeltaJetSpace:
    """A differential jet space: jet kernel, restricted derivation, horizontal basis."""

    jet: JetSpace
    derivation: list
    horizontal: list

    @property
    def dim_k(self):
        return self.jet.dim

    @property
    def dim_c(self):
        return len(self.horizontal)

    @property
    def precision(self):
        precs = [e.prec for v in self.horizontal for e in v if isinstance(e, TSeries)]
        return min(precs) if precs else None


def induced_module_derivation(variety: DVariety, point: SharpPoint, order_m):
    """The derivation matrix on the ambient truncated local algebra.

    When the variety is a proper subvariety, stability of the jet kernel
    under the dual operator is asserted to precision (InvarianceViolation
    otherwise) before the matrix is returned.
    """
    B, _ = _derivation_matrix(variety, point, order_m)
    if variety.generators:
        _restricted_system(variety, point, order_m, B)
    return B


def _restricted_system(variety, point, order_m, B):
    """Jet kernel basis plus the matrix R of the horizontal ODE on it.

    For a kernel basis vector b, the combination w = B b - b' must lie back
    in the kernel; its expansion coefficients are read off the free
    coordinates and the expansion residual witnesses invariance.
    """
    js = jet_space(variety.generators, point.coords, order_m)
    basis, free = js.basis, js.free_columns
    size = len(js.indices)
    R = [[None] * len(basis) for _ in range(len(basis))]
    for i, b in enumerate(basis):
        Bb = [None] * size
        for r in range(size):
            acc = None
            for c in range(size):
                if B[r][c].is_zero() or (isinstance(b[c], TSeries) and b[c].is_zero()):
                    continue
                term = B[r][c] * b[c]
                acc = term if acc is None else acc + term
            Bb[r] = acc if acc is not None else TSeries.zero(point.prec)
        w = [Bb[r] - b[r].derive() for r in range(size)]
        coeffs = [w[fc] for fc in free]
        # residual = w - sum_j coeffs[j] * basis[j], must vanish to precision
        for r in range(size):
            acc = w[r]
            for j, c in enumerate(coeffs):
                acc = acc - c * basis[j][r]
            if not acc.is_zero():
                raise InvarianceViolation(
                    "dual derivation leaves the jet kernel (residual "
                    f"{acc} in coordinate {r})"
                )
        for j, c in enumerate(coeffs):
            R[j][i] = c
    return js, R


def delta_jet_space(variety: DVariety, point: SharpPoint, order_m):
    """Horizontal jets at a sharp point: {v in Jet^m(V)_a : Dv = 0}.

    The horizontal coordinates satisfy v' = B v; restricting to the jet
    kernel gives a small ODE c' = R c whose fundamental matrix delivers a
    basis over the constants of the same cardinality as the jet dimension
    over the series field.
    """
    B, lam = _derivation_matrix(variety, point, order_m)
    if variety.generators:
        js, R = _restricted_system(variety, point, order_m, B)
    else:
        js = jet_space(variety.generators, point.coords, order_m)
        R = B
    if not js.basis:
        return DeltaJetSpace(js, R, [])
    rprec = min(e.prec for row in R for e in row)
    order = rprec + 1
    phi = fundamental_matrix(R, order)
    horizontal = []
    for k in range(len(js.basis)):
        vec = None
        for i, b in enumerate(js.basis):
            contrib = [phi[i][k] * x for x in b]
            vec = contrib if vec is None else [a + c for a, c in zip(vec, contrib)]
        horizontal.append(vec)
    return DeltaJetSpace(js, R, horizontal)


def constants_variety_jets(variety_generators, point, order_m, order=None):
    """Jets of the constant points of a variety defined over the constants.

    The horizontal vectors are exactly the rational nullspace of the jet
    equations, lifted to constant series; this realizes the zero-section
    D-variety structure on V(C).
    """
    from .series import DEFAULT_PRECISION

    order = DEFAULT_PRECISION if order is None else order
    point = tuple(Fraction(c) for c in point)
    js = jet_space(variety_generators, point, order_m)
    assert js.domain == RATIONAL
    horizontal = [
        [TSeries.constant(c, order) for c in vec] for vec in js.basis
    ]
    size = len(js.indices)
    zero_matrix = [
        [TSeries.zero(order) for _ in range(len(js.basis))]
        for _ in range(len(js.basis))
    ]
    return DeltaJetSpace(js, zero_matrix, horizontal)


def product_dvariety(left: DVariety, right: DVariety):
    """The product D-variety with componentwise section, variables renamed as needed."""
    used = list(left.vars)
    rename = {}
    for v in right.vars:
        name = v
        while name in used:
            name = name + "_"
        rename[v] = name
        used.append(name)
    allvars = tuple(used)
    right_vars = tuple(rename[v] for v in right.vars)

    def move(p, source_vars):
        moved = MPoly(source_vars, p.terms)
        return moved.embed(allvars)

    gens = tuple(p.embed(allvars) for p in left.generators) + tuple(
        move(p, right_vars) for p in right.generators
    )
    section = tuple(p.embed(allvars) for p in left.section) + tuple(
        move(p, right_vars) for p in right.section
    )
    name = f"{left.name or 'X1'}*{right.name or 'X2'}"
    return DVariety(allvars, gens, section, name=name)


def product_sharp_point(product: DVariety, left: SharpPoint, right: SharpPoint):
    coords = tuple(left.coords) + tuple(right.coords)
    initial = tuple(left.initial) + tuple(right.initial)
    return SharpPoint(product, coords, initial)
