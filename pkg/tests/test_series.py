import random
from fractions import Fraction as F

import pytest

from djets.errors import InsufficientPrecision, NonUnitDivisor
from djets.series import (
    TSeries,
    exp_series,
    fundamental_matrix,
    horizontal_test,
    transpose,
)


# -- independent oracles -----------------------------------------------------

def geometric_inverse(prec):
    # 1/(1-t) by the recursion c_k = c_{k-1}, c_0 = 1
    coeffs = [F(1)]
    for _ in range(prec):
        coeffs.append(coeffs[-1])
    return coeffs


def exp_recursion(c, prec):
    # y' = c y, y(0) = 1:  c_{k+1} = c * c_k / (k+1)
    coeffs = [F(1)]
    for k in range(prec):
        coeffs.append(F(c) * coeffs[-1] / (k + 1))
    return coeffs


def naive_fundamental(acoeffs, dim, order):
    # Phi_{k+1} = (A Phi)_k / (k+1) done with plain list convolution
    ident = [[F(int(i == j)) for j in range(dim)] for i in range(dim)]
    phis = [ident]
    for k in range(order):
        acc = [[F(0)] * dim for _ in range(dim)]
        for i in range(min(k, len(acoeffs) - 1) + 1):
            Ai, Pk = acoeffs[i], phis[k - i]
            for r in range(dim):
                for s in range(dim):
                    for c in range(dim):
                        acc[r][c] += Ai[r][s] * Pk[s][c]
        phis.append([[x / (k + 1) for x in row] for row in acc])
    return phis


# -- arithmetic ----------------------------------------------------------------

def test_difference_of_squares():
    assert TSeries([1, 1], 4) * TSeries([1, -1], 4) == TSeries([1, 0, -1], 4)


def test_geometric_series_division():
    inv = 1 / TSeries([1, -1], 4)
    assert list(inv.coeffs) == geometric_inverse(4)


def test_termwise_derivative():
    assert TSeries([1, 1, F(1, 2)], 2).derive() == TSeries([1, 1], 1)


def test_division_by_non_unit_rejected():
    with pytest.raises(NonUnitDivisor):
        TSeries([1], 3) / TSeries([0, 1], 3)


def test_division_inverts_multiplication():
    rng = random.Random(1)
    for _ in range(50):
        a = TSeries([F(rng.randint(-4, 4)) for _ in range(9)], 8)
        b = TSeries([F(rng.choice([1, 2, -1, 3]))] + [F(rng.randint(-4, 4)) for _ in range(8)], 8)
        assert (a / b) * b == a


def test_precision_tracking():
    a = TSeries([1, 2, 3], 5)
    b = TSeries([1, 1], 3)
    assert (a + b).prec == 3
    assert (a * b).prec == 3
    assert (a / b).prec == 3
    assert a.derive().prec == 4
    with pytest.raises(InsufficientPrecision):
        TSeries([7], 0).derive()


def test_prefix_stability_under_higher_precision():
    # recompute the same expressions at higher order and compare prefixes
    rng = random.Random(2)
    for _ in range(30):
        lo, hi = 6, 12
        coeffs_a = [F(rng.randint(-3, 3)) for _ in range(hi + 1)]
        coeffs_b = [F(rng.choice([1, -1, 2]))] + [F(rng.randint(-3, 3)) for _ in range(hi)]
        for op in (lambda x, y: x + y, lambda x, y: x * y, lambda x, y: x / y):
            small = op(TSeries(coeffs_a, lo), TSeries(coeffs_b, lo))
            big = op(TSeries(coeffs_a, hi), TSeries(coeffs_b, hi))
            assert big.coeffs[: small.prec + 1] == small.coeffs


def test_equality_is_agreement_to_shared_precision():
    assert TSeries([1, 2, 3], 2) == TSeries([1, 2], 1)
    assert TSeries([1, 2], 5) != TSeries([1, 3], 5)
    assert TSeries.constant(F(5, 2), 4) == F(5, 2)


def test_leibniz_rule_randomized():
    rng = random.Random(3)
    for _ in range(100):
        a = TSeries([F(rng.randint(-3, 3)) for _ in range(9)], 8)
        b = TSeries([F(rng.randint(-3, 3)) for _ in range(9)], 8)
        assert (a * b).derive() == a.derive() * b + a * b.derive()


def test_constants_form_a_field():
    rng = random.Random(4)
    for _ in range(50):
        a = TSeries.constant(F(rng.randint(-5, 5)), 8)
        b = TSeries.constant(F(rng.choice([1, 2, -3, 5])), 8)
        assert (a * b).is_constant()
        assert (a / b).is_constant()
        assert (a + b).is_constant()


def test_rendering():
    assert str(exp_series(1, 3)) == "1 + t + 1/2*t^2 + 1/6*t^3 + O(t^4)"
    assert str(TSeries.zero(2)) == "0 + O(t^3)"
    assert str(TSeries([0, -1], 3)) == "-t + O(t^4)"


# -- exponentials ----------------------------------------------------------------

def test_exp_series_against_recursion():
    assert list(exp_series(1, 3).coeffs) == exp_recursion(1, 3)
    assert exp_series(0, 7) == 1
    assert list(exp_series(2, 2).coeffs) == exp_recursion(2, 2) == [F(1), F(2), F(2)]


def test_exp_series_solves_its_ode():
    for c in (F(1), F(-2), F(1, 3)):
        y = exp_series(c, 16)
        assert y.derive() == c * y
        assert y.constant_term == 1


# -- fundamental matrices ----------------------------------------------------------

def test_fundamental_matrix_zero_and_scalar():
    phi = fundamental_matrix([[TSeries.zero(5)]], 5)
    assert phi[0][0] == 1
    phi = fundamental_matrix([[TSeries.constant(1, 3)]], 3)
    assert list(phi[0][0].coeffs) == exp_recursion(1, 3)


def test_fundamental_matrix_nilpotent():
    A = [[TSeries.zero(3), TSeries.constant(1, 3)],
         [TSeries.zero(3), TSeries.zero(3)]]
    phi = fundamental_matrix(A, 3)
    assert phi[0][0] == 1 and phi[1][1] == 1 and phi[1][0] == 0
    assert phi[0][1] == TSeries([0, 1], 3)


def test_fundamental_matrix_against_naive_recursion():
    rng = random.Random(5)
    for _ in range(20):
        dim = rng.randint(1, 3)
        deg = 2
        acoeffs = [
            [[F(rng.randint(-2, 2)) for _ in range(dim)] for _ in range(dim)]
            for _ in range(deg + 1)
        ]
        A = [
            [TSeries([acoeffs[k][r][c] for k in range(deg + 1)], 10)
             for c in range(dim)]
            for r in range(dim)
        ]
        phi = fundamental_matrix(A, 10)
        phis = naive_fundamental(acoeffs, dim, 10)
        for r in range(dim):
            for c in range(dim):
                assert list(phi[r][c].coeffs) == [phis[k][r][c] for k in range(11)]


def test_fundamental_matrix_satisfies_ode_and_initial_value():
    rng = random.Random(6)
    for _ in range(20):
        dim = rng.randint(1, 4)
        A = [
            [TSeries([F(rng.randint(-2, 2)) for _ in range(3)], 12)
             for _ in range(dim)]
            for _ in range(dim)
        ]
        phi = fundamental_matrix(A, 12)
        for r in range(dim):
            for c in range(dim):
                assert phi[r][c].constant_term == int(r == c)
                lhs = phi[r][c].derive()
                rhs = sum((A[r][k] * phi[k][c] for k in range(dim)),
                          TSeries.zero(12))
                assert lhs == rhs


def test_fundamental_matrix_precision_guard():
    with pytest.raises(InsufficientPrecision):
        fundamental_matrix([[TSeries.constant(1, 3)]], 10)


# -- horizontal tests ------------------------------------------------------------------

def test_horizontal_exp_solution():
    ok, consts = horizontal_test([exp_series(1, 12)], [[TSeries.constant(1, 12)]])
    assert ok and consts == [F(1)]


def test_horizontal_rejects_constant_under_scaling_system():
    ok, consts = horizontal_test([TSeries.constant(1, 12)],
                                 [[TSeries.constant(1, 12)]])
    assert not ok and consts is None


def test_horizontal_constant_under_zero_system():
    ok, consts = horizontal_test([TSeries.constant(F(7, 3), 12)],
                                 [[TSeries.zero(12)]])
    assert ok and consts == [F(7, 3)]


def test_horizontal_coordinates_of_combination():
    # v = 2*phi_1 - 3*phi_2 must report exactly (2, -3)
    A = [[TSeries([0, 1], 12), TSeries.constant(1, 12)],
         [TSeries.zero(12), TSeries([2, -1], 12)]]
    phi = fundamental_matrix(A, 12)
    cols = transpose(phi)
    v = [2 * a - 3 * b for a, b in zip(cols[0], cols[1])]
    ok, consts = horizontal_test(v, A)
    assert ok and consts == [F(2), F(-3)]
