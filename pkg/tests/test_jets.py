import random
from fractions import Fraction as F

import pytest

from djets.errors import BasePointMismatch, PointNotOnVariety, SingularPivot
from djets.jets import (
    JetIndexSet,
    apply_jet_matrix,
    jet_equations,
    jet_of_morphism,
    jet_space,
)
from djets.linalg import LinSystem, RATIONAL, rank
from djets.mpoly import MPoly, multi_indices
from djets.series import TSeries, exp_series


def plane():
    xy = ("x", "y")
    return xy, MPoly.variable(xy, "x"), MPoly.variable(xy, "y")


def test_index_set_size():
    lam = JetIndexSet.build(3, 2)
    assert len(lam) == 9  # binom(5, 2) - 1


def test_ambient_space_has_no_constraints():
    system = jet_equations((), (F(1), F(2)), 1)
    assert system.rows == [] and system.ncols == 2
    space = jet_space((), (F(1), F(2)), 1)
    assert space.dim == 2 and space.basis == [[1, 0], [0, 1]]
    assert jet_space((), (F(1), F(2)), 2).dim == 5


def test_parabola_order_one_equation():
    xy, x, y = plane()
    system = jet_equations((y - x**2,), (F(1), F(1)), 1)
    assert system.rows == [[F(-2), F(1)]]
    space = jet_space((y - x**2,), (F(1), F(1)), 1)
    assert space.basis == [[F(1), F(2)]]


def test_parabola_order_two_rows_and_dimension():
    # Hand oracle: on the curve the local parameter is u = x-1 and
    # y-1 = 2u + u^2, so an order-2 functional is determined by its values
    # (p, q) on u, u^2, giving coordinates
    #   z10 = p, z01 = 2p + q, z20 = q, z11 = 2q, z02 = 4q.
    oracle_basis = [
        [F(1), F(2), F(0), F(0), F(0)],   # p = 1, q = 0
        [F(0), F(1), F(1), F(2), F(4)],   # p = 0, q = 1
    ]
    xy, x, y = plane()
    system = jet_equations((y - x**2,), (F(1), F(1)), 2)
    # one row per (generator, shift): shifts 0, (1,0), (0,1)
    assert [label for _, label in zip(system.rows, system.labels)] == [
        (0, (0, 0)), (0, (1, 0)), (0, (0, 1))
    ]
    # the unshifted row carries the divided-power Taylor coefficients
    assert system.rows[0] == [F(-2), F(1), F(-1), F(0), F(0)]
    space = jet_space((y - x**2,), (F(1), F(1)), 2)
    assert space.dim == 2
    # both bases must solve each other's systems exactly
    for v in oracle_basis:
        for row in system.rows:
            assert sum(a * b for a, b in zip(row, v)) == 0
    for v in space.basis:
        # membership in the oracle span: v = v[0]*(first) + coeff*(second)
        p, q = v[0], v[2]
        expected = [
            p * oracle_basis[0][k] + q * oracle_basis[1][k] for k in range(5)
        ]
        assert v == expected


def test_point_must_lie_on_variety():
    xy, x, y = plane()
    with pytest.raises(PointNotOnVariety):
        jet_equations((y - x**2,), (F(1), F(2)), 1)


def test_dimension_law_random():
    rng = random.Random(13)
    xy, x, y = plane()
    for _ in range(25):
        # generators vanishing at (1, 1), assembled from (x-1) and (y-1)
        gens = []
        for _ in range(rng.randint(1, 2)):
            g = (x - 1) ** rng.randint(1, 2) * rng.randint(1, 3) + (
                y - 1
            ) * rng.randint(-2, 2)
            if not g.is_zero():
                gens.append(g)
        order = rng.randint(1, 3)
        space = jet_space(tuple(gens), (F(1), F(1)), order)
        system = space.system
        assert space.dim == len(space.indices) - rank(
            LinSystem(system.rows, system.ncols, RATIONAL)
        )


def test_jet_of_identity_is_identity():
    xy, x, y = plane()
    space = jet_space((), (F(1), F(2)), 2)
    matrix = jet_of_morphism((x, y), (F(1), F(2)), 2, space, space)
    size = len(space.indices)
    assert matrix == [
        [F(int(i == j)) for j in range(size)] for i in range(size)
    ]


def test_jet_of_squaring_scales_by_derivative():
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    # oracle: x^2 - 1 = 2(x-1) + (x-1)^2, so the order-1 coefficient is 2
    src = jet_space((), (F(1),), 1)
    tgt = jet_space((), (F(1),), 1)
    matrix = jet_of_morphism((x**2,), (F(1),), 1, src, tgt)
    assert matrix == [[F(2)]]


def test_jet_functoriality_specific():
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    f = (x**2,)
    g = (x + 1,)
    a = (F(1),)
    fa = (F(1),)
    gfa = (F(2),)
    src = jet_space((), a, 2)
    mid = jet_space((), fa, 2)
    tgt = jet_space((), gfa, 2)
    Tf = jet_of_morphism(f, a, 2, src, mid)
    Tg = jet_of_morphism(g, fa, 2, mid, tgt)
    composed = (x**2 + 1,)
    Tgf = jet_of_morphism(composed, a, 2, src, tgt)
    # oracle: by direct Taylor composition,
    #   f - 1 = 2u + u^2 and (f - 1)^2 = 4u^2 + O(u^3)   (u = x - 1)
    #   g - 2 = v and (g - 2)^2 = v^2                    (v = y - 1)
    assert Tf == [[F(2), F(1)], [F(0), F(4)]]
    assert Tg == [[F(1), F(0)], [F(0), F(1)]]
    product = [
        [sum(Tg[i][k] * Tf[k][j] for k in range(2)) for j in range(2)]
        for i in range(2)
    ]
    assert product == Tgf


def test_jet_morphism_base_point_checked():
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    src = jet_space((), (F(1),), 1)
    tgt = jet_space((), (F(5),), 1)
    with pytest.raises(BasePointMismatch):
        jet_of_morphism((x**2,), (F(1),), 1, src, tgt)


def test_squaring_map_invertible_at_series_unit_point():
    # the doubling cover away from zero: full rank at a unit series point
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    a = exp_series(1, 12)
    src = jet_space((), (a,), 2)
    tgt = jet_space((), (a * a,), 2)
    matrix = jet_of_morphism((x**2,), (a,), 2, src, tgt)
    # eliminate with unit pivots: success means invertibility over the series field
    from djets.linalg import SERIES, rref

    _, pivots = rref(matrix, 2, SERIES)
    assert len(pivots) == 2


def test_squaring_map_singular_at_origin_point():
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    t = TSeries([0, 1], 8)
    src = jet_space((), (t,), 1)
    tgt = jet_space((), (t * t,), 1)
    matrix = jet_of_morphism((x**2,), (t,), 1, src, tgt)
    from djets.linalg import SERIES, rref

    with pytest.raises(SingularPivot):
        rref(matrix, 1, SERIES)


def test_apply_jet_matrix_maps_source_basis_into_target():
    # the parabola maps to the line by projection (x, y) -> x
    xy, x, y = plane()
    xs = ("x",)
    proj = (MPoly.variable(xy, "x"),)
    src = jet_space((y - x**2,), (F(1), F(1)), 1)
    tgt = jet_space((), (F(1),), 1)
    matrix = jet_of_morphism(proj, (F(1), F(1)), 1, src, tgt)
    image = apply_jet_matrix(matrix, src.basis[0])
    assert image == [F(1)]
