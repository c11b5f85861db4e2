import random
from fractions import Fraction as F
from math import factorial

import pytest

from djets.dvariety import (
    DVariety,
    SharpPoint,
    constants_variety_jets,
    delta_jet_space,
    induced_module_derivation,
    product_dvariety,
    product_sharp_point,
    prolongation,
    sharp_integrate,
    validate_section,
)
from djets.dvariety import _derivation_matrix
from djets.errors import InvarianceViolation, PointNotOnVariety
from djets.jets import JetIndexSet, jet_equations
from djets.mpoly import MPoly, multi_indices
from djets.series import TSeries, exp_series


def line(coeff=1):
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    return DVariety(xs, (), (coeff * x,))


def parabola():
    xy = ("x", "y")
    x = MPoly.variable(xy, "x")
    y = MPoly.variable(xy, "y")
    return DVariety(xy, (y - x**2,), (MPoly.constant(xy, 1), 2 * x))


def plane_system():
    xy = ("x", "y")
    x = MPoly.variable(xy, "x")
    y = MPoly.variable(xy, "y")
    return DVariety(xy, (), (x**2 - y**2, x**2 - x * y), name="X")


# -- prolongation -------------------------------------------------------------

def test_prolongation_of_affine_space_is_empty():
    assert prolongation(line()) == []


def test_prolongation_of_parabola():
    eqs = prolongation(parabola())
    allv = ("x", "y", "u_x", "u_y")
    x = MPoly.variable(allv, "x")
    y = MPoly.variable(allv, "y")
    ux = MPoly.variable(allv, "u_x")
    uy = MPoly.variable(allv, "u_y")
    assert eqs[0] == y - x**2
    assert eqs[1] == uy - 2 * x * ux


def test_prolongation_of_circle():
    xy = ("x", "y")
    x = MPoly.variable(xy, "x")
    y = MPoly.variable(xy, "y")
    circle = DVariety(xy, (x**2 + y**2 - 1,), (MPoly.zero(xy), MPoly.zero(xy)))
    eqs = prolongation(circle)
    allv = ("x", "y", "u_x", "u_y")
    xx = MPoly.variable(allv, "x")
    yy = MPoly.variable(allv, "y")
    ux = MPoly.variable(allv, "u_x")
    uy = MPoly.variable(allv, "u_y")
    assert eqs[1] == 2 * xx * ux + 2 * yy * uy


# -- section validation ----------------------------------------------------------

def test_validate_plane_system_vacuous():
    result = validate_section(plane_system())
    assert result.ok and result.exact


def test_validate_parabola_section():
    assert validate_section(parabola()).ok


def test_validate_rejects_bad_section():
    xy = ("x", "y")
    x = MPoly.variable(xy, "x")
    y = MPoly.variable(xy, "y")
    one = MPoly.constant(xy, 1)
    bad = DVariety(xy, (y - x**2,), (one, one))
    result = validate_section(bad)
    assert not result.ok and result.exact
    # residual is 1 - 2x up to sign convention of the reduction
    assert result.residuals[0] == -2 * MPoly.variable(xy, "x") + 1


def test_validate_sampled_fallback():
    # circle ideal cannot be oriented as a triangular rewrite
    xy = ("x", "y")
    x = MPoly.variable(xy, "x")
    y = MPoly.variable(xy, "y")
    circle = DVariety(xy, (x**2 + y**2 - 1,), (-y, x))
    result = validate_section(circle, samples=[(F(1), F(0)), (F(0), F(1)),
                                               (F(3, 5), F(4, 5))])
    assert result.ok and not result.exact and result.sampled_points == 3


# -- sharp integration -------------------------------------------------------------

def test_sharp_integrate_exponential():
    point = sharp_integrate(line(), (1,), 8)
    assert list(point.coords[0].coeffs) == [F(1, factorial(k)) for k in range(9)]


def test_sharp_integrate_geometric():
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    growth = DVariety(xs, (), (x * x,))
    point = sharp_integrate(growth, (1,), 8)
    assert list(point.coords[0].coeffs) == [F(1)] * 9


def test_sharp_integrate_equilibrium():
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    shifted = DVariety(xs, (), (x - 2,))
    point = sharp_integrate(shifted, (2,), 6)
    assert point.coords[0].is_constant()


def test_sharp_integrate_requires_point_on_variety():
    with pytest.raises(PointNotOnVariety):
        sharp_integrate(parabola(), (1, 2), 6)


def test_sharp_point_stays_on_variety():
    point = sharp_integrate(parabola(), (2, 4), 16)
    x, y = point.coords
    assert y == x * x
    assert x.derive() == 1
    assert y.derive() == 2 * x


# -- the induced derivation ---------------------------------------------------------

def test_induced_derivation_identity_flow():
    point = sharp_integrate(line(), (1,), 8)
    matrix = induced_module_derivation(line(), point, 1)
    assert matrix[0][0] == 1


def test_induced_derivation_constant_section():
    xs = ("x",)
    const = DVariety(xs, (), (MPoly.constant(xs, 5),))
    point = sharp_integrate(const, (0,), 8)
    matrix = induced_module_derivation(const, point, 1)
    assert matrix[0][0].is_zero()


def test_induced_derivation_plane_system_is_jacobian():
    X = plane_system()
    point = sharp_integrate(X, (2, 1), 10)
    a1, a2 = point.coords
    matrix = induced_module_derivation(X, point, 1)
    assert matrix[0][0] == 2 * a1 and matrix[0][1] == -2 * a2
    assert matrix[1][0] == 2 * a1 - a2 and matrix[1][1] == -a1


def test_induced_derivation_satisfies_leibniz_on_monomials():
    # d((x-a)^(alpha+beta)) must equal the Leibniz combination, truncated
    rng = random.Random(29)
    X = plane_system()
    point = sharp_integrate(X, (2, 1), 10)
    for order_m in (2, 3):
        B, lam = _derivation_matrix(X, point, order_m)
        pos = {a: i for i, a in enumerate(lam.indices)}

        def d_of(alpha):
            return {
                beta: B[pos[alpha]][pos[beta]]
                for beta in lam.indices
                if not B[pos[alpha]][pos[beta]].is_zero()
            }

        for _ in range(20):
            alpha = lam.indices[rng.randrange(len(lam))]
            beta = lam.indices[rng.randrange(len(lam))]
            total = tuple(a + b for a, b in zip(alpha, beta))
            lhs = d_of(total) if sum(total) <= order_m else {}
            rhs = {}
            for gamma, value in d_of(alpha).items():
                key = tuple(g + b for g, b in zip(gamma, beta))
                if sum(key) <= order_m:
                    rhs[key] = rhs.get(key, TSeries.zero(value.prec)) + value
            for gamma, value in d_of(beta).items():
                key = tuple(g + a for g, a in zip(gamma, alpha))
                if sum(key) <= order_m:
                    rhs[key] = rhs.get(key, TSeries.zero(value.prec)) + value
            keys = set(lhs) | set(rhs)
            for key in keys:
                left = lhs.get(key, TSeries.zero(point.prec))
                right = rhs.get(key, TSeries.zero(point.prec))
                assert left == right


# -- differential jet spaces -----------------------------------------------------------

def test_delta_jets_of_zero_section_are_constants():
    xs = ("x",)
    flat = DVariety(xs, (), (MPoly.zero(xs),))
    point = sharp_integrate(flat, (4,), 8)
    space = delta_jet_space(flat, point, 1)
    assert space.dim_k == space.dim_c == 1
    assert all(e.is_constant() for v in space.horizontal for e in v)


def test_delta_jets_of_exponential_flow():
    point = sharp_integrate(line(), (1,), 10)
    space = delta_jet_space(line(), point, 1)
    assert space.dim_c == 1
    (v,) = space.horizontal
    assert v[0].derive() == v[0]


def test_delta_jets_of_plane_system_satisfy_displayed_equations():
    X = plane_system()
    point = sharp_integrate(X, (2, 1), 12)
    x, y = point.coords
    space = delta_jet_space(X, point, 1)
    assert space.dim_k == space.dim_c == 2
    for u, v in space.horizontal:
        assert u.derive() == 2 * (x * u - y * v)
        assert v.derive() == 2 * x * u - y * u - x * v


def test_delta_jets_dimension_law_across_examples():
    cases = [
        (line(), (1,), 1),
        (line(), (1,), 2),
        (parabola(), (1, 1), 1),
        (parabola(), (1, 1), 2),
        (plane_system(), (2, 1), 1),
        (plane_system(), (2, 1), 2),
    ]
    for variety, start, order_m in cases:
        point = sharp_integrate(variety, start, 14)
        space = delta_jet_space(variety, point, order_m)
        assert space.dim_c == space.dim_k
        # horizontal vectors satisfy the jet equations and the dual condition
        system = space.jet.system
        B, lam = _derivation_matrix(variety, point, order_m)
        for v in space.horizontal:
            for row in system.rows:
                acc = None
                for a, b in zip(row, v):
                    term = a * b
                    acc = term if acc is None else acc + term
                assert acc.is_zero()
            for i, alpha in enumerate(lam.indices):
                rhs = None
                for j in range(len(lam)):
                    term = B[i][j] * v[j]
                    rhs = term if rhs is None else rhs + term
                assert v[i].derive() == rhs


def test_invariance_violation_for_fake_sharp_point():
    # a point on the parabola that does not integrate the section
    xy = ("x", "y")
    x = MPoly.variable(xy, "x")
    y = MPoly.variable(xy, "y")
    variety = DVariety(xy, (y - x**2,), (x, 2 * x**2))
    good = sharp_integrate(variety, (1, 1), 10)
    assert delta_jet_space(variety, good, 1).dim_c == 1
    drift = TSeries([1, 1], 10)  # 1 + t, not a solution of x' = x
    fake = SharpPoint(variety, (drift, drift * drift), (F(1), F(1)))
    with pytest.raises(InvarianceViolation):
        delta_jet_space(variety, fake, 1)


# -- jets of constant points ------------------------------------------------------------

def test_constant_points_parabola():
    xy = ("x", "y")
    x = MPoly.variable(xy, "x")
    y = MPoly.variable(xy, "y")
    space = constants_variety_jets((y - x**2,), (1, 1), 1, order=10)
    assert space.jet.basis == [[F(1), F(2)]]
    assert all(e.is_constant() for v in space.horizontal for e in v)


def test_constant_points_affine_line_order_two():
    space = constants_variety_jets((), (0,), 2, order=10)
    assert space.dim_k == space.dim_c == 2


def test_constant_points_diagonal():
    xy = ("x", "y")
    x = MPoly.variable(xy, "x")
    y = MPoly.variable(xy, "y")
    for c in (F(1), F(-2), F(3, 7)):
        space = constants_variety_jets((x - y,), (c, c), 1, order=8)
        assert space.jet.basis == [[F(1), F(1)]]


# -- flow derivatives (dual numbers) -------------------------------------------------


class Dual:
    """First-order jets in a formal parameter eps, over series."""

    def __init__(self, re, im):
        self.re = re
        self.im = im

    def _lift(self, other):
        if isinstance(other, Dual):
            return other
        if isinstance(other, (int, F, TSeries)):
            zero = self.re - self.re
            return Dual(self.re._lift(other) if isinstance(other, (int, F)) else other,
                        zero)
        return None

    def __add__(self, other):
        o = self._lift(other)
        return Dual(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __mul__(self, other):
        o = self._lift(other)
        return Dual(self.re * o.re, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = Dual(TSeries.constant(1, self.re.prec), TSeries.zero(self.re.prec))
        for _ in range(n):
            out = out * self
        return out


def test_flow_derivative_satisfies_linearized_system():
    # integrate from a0 + eps*b to first order; the eps part must be horizontal
    for variety, start, tangent in [
        (plane_system(), (2, 1), (1, 0)),
        (plane_system(), (2, 1), (0, 1)),
        (parabola(), (1, 1), (1, 2)),  # tangent to the curve at (1, 1)
    ]:
        order = 10
        main = [[F(c)] for c in start]
        eps = [[F(b)] for b in tangent]
        for k in range(order):
            point = [
                Dual(TSeries(m, k), TSeries(e, k)) for m, e in zip(main, eps)
            ]
            for j, s in enumerate(variety.section):
                value = s.eval(point)
                if not isinstance(value, Dual):
                    value = Dual(TSeries.constant(value, k), TSeries.zero(k))
                main[j].append(value.re.coeffs[k] / (k + 1))
                eps[j].append(value.im.coeffs[k] / (k + 1))
        flow = [TSeries(m, order) for m in main]
        deriv = [TSeries(e, order) for e in eps]
        sharp = sharp_integrate(variety, start, order)
        assert all(a == b for a, b in zip(flow, sharp.coords))
        # eps part solves v' = J_s(a(t)) v
        for i, s in enumerate(variety.section):
            rhs = None
            for j, v in enumerate(variety.vars):
                term = s.partial(v).eval(flow) * deriv[j]
                rhs = term if rhs is None else rhs + term
            assert deriv[i].derive() == rhs
        # and satisfies the order-1 jet constraints when the variety is proper
        if variety.generators:
            system = jet_equations(variety.generators, sharp.coords, 1)
            for row in system.rows:
                acc = None
                for a, b in zip(row, deriv):
                    term = a * b
                    acc = term if acc is None else acc + term
                assert acc.is_zero()


# -- products ---------------------------------------------------------------------------

def test_product_variety_renames_and_integrates():
    prod = product_dvariety(line(), line(2))
    assert prod.vars == ("x", "x_")
    left = sharp_integrate(line(), (1,), 8)
    right = sharp_integrate(line(2), (1,), 8)
    point = product_sharp_point(prod, left, right)
    space = delta_jet_space(prod, point, 1)
    assert space.dim_k == space.dim_c == 2
