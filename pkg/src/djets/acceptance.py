"""The verification suite: every headline computation as a pass/fail check.

Each check builds its own inputs, runs at the pinned working precision
(24 unless stated otherwise), and reports exact-zero residuals; the CLI
`suite` command and the acceptance tests both run this module, so there is
a single source of truth for what "green" means.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import diffpoly as dp
from .delta_modules import (
    DeltaModule,
    dual,
    horizontal_sections,
    is_horizontal,
    product_jet_decompose,
    verify_tensor_pairing,
)
from .dvariety import (
    DVariety,
    constants_variety_jets,
    delta_jet_space,
    product_dvariety,
    product_sharp_point,
    sharp_integrate,
)
from .errors import DecompositionFailure
from .jets import apply_jet_matrix, jet_of_morphism, jet_space
from .mpoly import MPoly, multi_indices_with_zero
from .series import TSeries, exp_series, fundamental_matrix
from .tangent import (
    counterexample_report,
    counterexample_variety,
    degree_identity_check,
    delta_tangent,
    diagonal_restriction,
    fiber_linearity_check,
    in_log_constant_group,
    log_derivative,
    m1_equivalence,
    restrict,
)

PRECISION = 24


@dataclass
class AcceptanceResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.key}: {self.title} ({self.seconds:.2f}s) {self.detail}"


def _timed(key, title, budget, fn):
    start = time.perf_counter()
    passed, detail = fn()
    elapsed = time.perf_counter() - start
    return AcceptanceResult(key, title, passed, detail, elapsed, budget)


# -- individual criteria -----------------------------------------------------------


def check_tangent_display():
    def run():
        X = counterexample_variety()
        T = delta_tangent(X, fiber_names=("u", "v"))
        eqs = T.fiber_equations()
        allv = T.all_vars
        x = MPoly.variable(allv, "x")
        y = MPoly.variable(allv, "y")
        u = MPoly.variable(allv, "u")
        v = MPoly.variable(allv, "v")
        expected = [2 * x * u - 2 * y * v, (2 * x - y) * u - x * v]
        ok = eqs[0] == expected[0] and eqs[1] == expected[1]
        texts = [f"delta {n} = {e}" for n, e in zip(T.fiber_vars, eqs)]
        ok = ok and texts == [
            "delta u = 2*x*u - 2*y*v",
            "delta v = 2*x*u - x*v - y*u",
        ]
        return ok, "; ".join(texts)

    return _timed("tangent-display", "Jacobian linearization of the plane system",
                  1.0, run)


def check_restriction_display():
    def run():
        X = counterexample_variety()
        T = delta_tangent(X, fiber_names=("u", "v"))
        W = restrict(T, diagonal_restriction())
        pres = W.presentation()
        allv = W.all_vars
        x = MPoly.variable(allv, "x")
        y = MPoly.variable(allv, "y")
        u = MPoly.variable(allv, "u")
        v = MPoly.variable(allv, "v")
        ok = (
            len(pres) == 4
            and pres[0][:2] == ("algebraic", "x")
            and pres[0][2] == y
            and pres[1][:2] == ("derivative", "x")
            and pres[1][2].is_zero()
            and pres[2][:2] == ("derivative", "u")
            and pres[2][2] == 2 * x * u - 2 * x * v
            and pres[3][:2] == ("derivative", "v")
            and pres[3][2] == x * u - x * v
        )
        return ok, "; ".join(W.presentation_text())

    return _timed("restriction-display", "restriction to the constant diagonal",
                  1.0, run)


def check_kernel_identity():
    def run():
        X = counterexample_variety()
        W = restrict(delta_tangent(X, fiber_names=("u", "v")),
                     diagonal_restriction())
        allv = W.all_vars
        w = dp.DiffPoly.variable(allv, "u") - dp.DiffPoly.variable(allv, "v")
        system = W.substitution_system()
        dw = dp.total_derivative(w)
        expr = dp.total_derivative(dw) * w - dw * dw
        normal_form = dp.reduce(expr, system)
        ok = normal_form.is_zero() and dp.log_derivative_constant_identity(system, w)
        return ok, f"normal form = {normal_form}"

    return _timed("kernel-identity",
                  "second log derivative of u - v vanishes symbolically", 1.0, run)


def check_surjectivity_witnesses():
    def run():
        ratios = (0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-3, 5))
        report = counterexample_report(precision=PRECISION, ratios=ratios)
        ok = report.kernel_identity
        details = []
        for w in report.witnesses:
            image_is_exp = w.image == exp_series(w.ratio, PRECISION)
            ok = ok and w.ok and image_is_exp
            details.append(f"c={w.ratio}:{'ok' if w.ok and image_is_exp else 'FAIL'}")
        return ok, " ".join(details)

    return _timed("surjectivity-witnesses",
                  "witness family (c, c, 2 exp(ct), exp(ct))", 2.0, run)


def _random_module(rng, dim, prec=PRECISION, degree=2, bound=2):
    rows = []
    for _ in range(dim):
        row = []
        for _ in range(dim):
            coeffs = [Fraction(rng.randint(-bound, bound)) for _ in range(degree + 1)]
            row.append(TSeries(coeffs, prec))
        rows.append(row)
    return DeltaModule.from_rows(rows)


def check_dimension_law(seed=0):
    def run():
        rng = random.Random(seed)
        for trial in range(50):
            dim = rng.randint(1, 4)
            module = _random_module(rng, dim)
            sections = horizontal_sections(module)
            if len(sections) != dim:
                return False, f"trial {trial}: {len(sections)} sections for dim {dim}"
            for s in sections:
                if not is_horizontal(module, s):
                    return False, f"trial {trial}: nonzero residual"
        return True, "50 random modules, dim of horizontal basis = module dim"

    return _timed("dimension-law", "horizontal sections count the module dimension",
                  10.0, run)


def check_tensor_pairing(seed=1):
    def run():
        rng = random.Random(seed)
        for trial in range(20):
            dm = rng.randint(1, 3)
            dn = rng.randint(1, 3)
            rep = verify_tensor_pairing(
                _random_module(rng, dm), _random_module(rng, dn)
            )
            if not rep.ok:
                return False, f"trial {trial}: {rep.to_json()}"
        return True, "20 random module pairs, dims and spans agree"

    return _timed("tensor-pairing",
                  "pairings of horizontal duals span the dual tensor", 20.0, run)


def _line(section_coeff, name=""):
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    return DVariety(xs, (), (section_coeff * x,), name=name or f"line{section_coeff}")


def check_product_decomposition():
    def run():
        x1 = _line(1, "exp_line")
        x2 = _line(2, "exp2_line")
        X = counterexample_variety()
        details = []
        suites = [
            (x1, (1,), x2, (1,)),
            (X, (2, 1), x1, (1,)),
        ]
        for left, left_pt, right, right_pt in suites:
            lp = sharp_integrate(left, left_pt, PRECISION)
            rp = sharp_integrate(right, right_pt, PRECISION)
            prod = product_dvariety(left, right)
            pp = product_sharp_point(prod, lp, rp)
            for m in (1, 2):
                W = delta_jet_space(left, lp, m).horizontal
                Wp = delta_jet_space(right, rp, m).horizontal
                space = delta_jet_space(prod, pp, m)
                count = 0
                for v in space.horizontal:
                    try:
                        product_jet_decompose(
                            v, W, Wp, left.nvars, right.nvars, m
                        )
                    except DecompositionFailure as exc:
                        return False, f"{prod.name} m={m}: {exc}"
                    count += 1
                details.append(f"{prod.name} m={m}: {count} jets constant")
        return True, "; ".join(details)

    return _timed("product-decomposition",
                  "horizontal product jets decompose with constant coefficients",
                  30.0, run)


def check_constant_points_jets():
    def run():
        xy = ("x", "y")
        x = MPoly.variable(xy, "x")
        y = MPoly.variable(xy, "y")
        space = constants_variety_jets((y - x**2,), (1, 1), 1, order=PRECISION)
        ok = space.jet.basis == [[Fraction(1), Fraction(2)]]
        ok = ok and all(
            e.is_constant() for vec in space.horizontal for e in vec
        )
        ok = ok and [
            [e.constant_term for e in vec] for vec in space.horizontal
        ] == [[Fraction(1), Fraction(2)]]
        return ok, f"basis {space.jet.basis}"

    return _timed("constant-points-jets",
                  "jets of constant points equal the rational nullspace", 1.0, run)


def corpus(order=PRECISION):
    """The D-varieties exercised by the cross-check suite, with sharp points."""
    xy = ("x", "y")
    x = MPoly.variable(xy, "x")
    y = MPoly.variable(xy, "y")
    parabola = DVariety(
        xy, (y - x**2,), (MPoly.constant(xy, 1), 2 * x), name="parabola"
    )
    X = counterexample_variety()
    singles = [
        (_line(1, "exp_line"), (1,)),
        (_line(2, "exp2_line"), (1,)),
        (_line(0, "flat_line"), (3,)),
        (_square_line(), (1,)),
        (parabola, (1, 1)),
        (X, (2, 1)),
    ]
    entries = [(v, sharp_integrate(v, pt, order)) for v, pt in singles]
    prod_a = product_dvariety(_line(1), _line(2))
    entries.append(
        (
            prod_a,
            product_sharp_point(
                prod_a,
                sharp_integrate(_line(1), (1,), order),
                sharp_integrate(_line(2), (1,), order),
            ),
        )
    )
    prod_b = product_dvariety(X, _line(1))
    entries.append(
        (
            prod_b,
            product_sharp_point(
                prod_b,
                sharp_integrate(X, (2, 1), order),
                sharp_integrate(_line(1), (1,), order),
            ),
        )
    )
    return entries


def _square_line():
    xs = ("x",)
    x = MPoly.variable(xs, "x")
    return DVariety(xs, (), (x * x,), name="geometric_line")


def check_m1_crosscheck():
    def run():
        details = []
        for variety, point in corpus():
            rep = m1_equivalence(variety, point)
            if not rep.ok:
                return False, f"{variety.name}: {rep.to_json()}"
            details.append(f"{variety.name}:dim{rep.dim_jet_route}")
        return True, " ".join(details)

    return _timed("m1-crosscheck",
                  "order-1 jets agree with the Jacobian linearization", 10.0, run)


def _random_series_poly_xy(rng, ydeg, prec, unit_lead=True):
    xy = ("x", "y")
    terms = {}
    for ey in range(ydeg + 1):
        for ex in range(2):
            if rng.random() < 0.5 and not (unit_lead and ey == ydeg and ex == 0):
                continue
            coeffs = [Fraction(rng.randint(-2, 2)) for _ in range(3)]
            if ey == ydeg and ex == 0 and unit_lead:
                coeffs[0] = Fraction(rng.choice([1, 2, -1, 3]))
            series = TSeries(coeffs, prec)
            if not series.is_zero():
                terms[(ex, ey)] = series
    return MPoly(xy, terms)


def check_degree_step(seed=2):
    def run():
        rng = random.Random(seed)
        trials = 0
        while trials < 100:
            P = _random_series_poly_xy(rng, rng.randint(0, 3), PRECISION)
            Q = _random_series_poly_xy(rng, rng.randint(0, 3), PRECISION)
            if P.is_zero() or Q.is_zero():
                continue
            rep = degree_identity_check(P, Q)
            if not rep.leading_unit:
                continue
            if not rep.ok:
                return False, f"trial {trials}: {rep.to_json()}"
            trials += 1
        return True, "100 random pairs satisfy the degree gap"

    return _timed("degree-step",
                  "log-derivative degree comparison never balances", 5.0, run)


def check_series_oracles():
    def run():
        exp_line = _line(1)
        point = sharp_integrate(exp_line, (1,), PRECISION)
        expected = [Fraction(1, factorial(k)) for k in range(PRECISION + 1)]
        if list(point.coords[0].coeffs) != expected:
            return False, "exponential coefficients differ from 1/k!"
        geo = sharp_integrate(_square_line(), (1,), PRECISION)
        if list(geo.coords[0].coeffs) != [Fraction(1)] * (PRECISION + 1):
            return False, "geometric coefficients differ from all ones"
        return True, "exp and 1/(1-t) reproduced through order 24"

    return _timed("series-oracles", "sharp integration reproduces exp and 1/(1-t)",
                  1.0, run)


# -- the randomized property suites ---------------------------------------------------


def _random_mpoly(rng, variables, degree=5, nterms=4, bound=3):
    terms = {}
    for _ in range(nterms):
        exps = []
        remaining = degree
        for _ in variables:
            e = rng.randint(0, remaining)
            exps.append(e)
            remaining -= e
        c = rng.randint(-bound, bound)
        if c:
            terms[tuple(exps)] = terms.get(tuple(exps), 0) + Fraction(c)
    return MPoly(variables, terms)


def _suite_hasse(rng, cases):
    variables = ("x", "y", "z")
    for _ in range(cases):
        p = _random_mpoly(rng, variables)
        q = _random_mpoly(rng, variables)
        alpha = tuple(rng.randint(0, 2) for _ in variables)
        lhs = (p * q).hasse(alpha)
        rhs = MPoly.zero(variables)
        for beta in multi_indices_with_zero(len(variables), sum(alpha)):
            if any(b > a for b, a in zip(beta, alpha)):
                continue
            gamma = tuple(a - b for a, b in zip(alpha, beta))
            rhs = rhs + p.hasse(beta) * q.hasse(gamma)
        if lhs != rhs:
            return False, f"hasse product rule failed for alpha={alpha}"
    return True, None


def _random_series(rng, prec=12, bound=3, unit=False):
    coeffs = [Fraction(rng.randint(-bound, bound)) for _ in range(prec + 1)]
    if unit and coeffs[0] == 0:
        coeffs[0] = Fraction(rng.choice([1, -1, 2]))
    return TSeries(coeffs, prec)


def _suite_leibniz(rng, cases):
    for _ in range(cases):
        a = _random_series(rng)
        b = _random_series(rng)
        if (a * b).derive() != a.derive() * b + a * b.derive():
            return False, "series Leibniz failed"
        variables = ("x", "y")
        p = _random_diffpoly(rng, variables)
        q = _random_diffpoly(rng, variables)
        lhs = dp.total_derivative(p * q)
        rhs = dp.total_derivative(p) * q + p * dp.total_derivative(q)
        if lhs != rhs:
            return False, "total derivative Leibniz failed"
    return True, None


def _random_diffpoly(rng, variables, nterms=3):
    out = dp.DiffPoly.zero(variables)
    for _ in range(nterms):
        term = dp.DiffPoly.constant(variables, rng.randint(-2, 2))
        for _ in range(rng.randint(0, 2)):
            j = rng.randrange(len(variables))
            k = rng.randint(0, 2)
            term = term * dp.DiffPoly.variable(variables, variables[j], k)
        out = out + term
    return out


def _random_map(rng, n_src, n_tgt):
    variables = tuple(f"x{i}" for i in range(n_src))
    comps = []
    for _ in range(n_tgt):
        comps.append(_random_mpoly(rng, variables, degree=2, nterms=3, bound=2))
    return variables, tuple(comps)


def _suite_functoriality(rng, cases):
    for _ in range(cases):
        n1 = rng.randint(1, 3)
        n2 = rng.randint(1, 2)
        n3 = rng.randint(1, 2)
        order = rng.randint(1, 3)
        vars1, f = _random_map(rng, n1, n2)
        vars2, g = _random_map(rng, n2, n3)
        a = tuple(Fraction(rng.randint(-2, 2)) for _ in range(n1))
        fa = tuple(p.eval(a) for p in f)
        gfa = tuple(p.eval(fa) for p in g)
        src = jet_space((), a, order)
        mid = jet_space((), fa, order)
        tgt = jet_space((), gfa, order)
        Tf = jet_of_morphism(f, a, order, src, mid)
        Tg = jet_of_morphism(g, fa, order, mid, tgt)
        composed = tuple(p.eval(tuple(q.embed(vars1) for q in f)) for p in g)
        composed = tuple(
            p if isinstance(p, MPoly) else MPoly.constant(vars1, p) for p in composed
        )
        Tgf = jet_of_morphism(composed, a, order, src, tgt)
        product = [
            [
                sum((Tg[i][k] * Tf[k][j] for k in range(len(Tf))), Fraction(0))
                for j in range(len(Tf[0]))
            ]
            for i in range(len(Tg))
        ]
        if product != Tgf:
            return False, f"functoriality failed at order {order}"
    return True, None


def _suite_log_derivative(rng, cases):
    for _ in range(cases):
        a = _random_series(rng, unit=True)
        b = _random_series(rng, unit=True)
        if log_derivative(a * b) != log_derivative(a) + log_derivative(b):
            return False, "log derivative is not additive on products"
    return True, None


def _suite_group_closure(rng, cases):
    for _ in range(cases):
        c0 = Fraction(rng.choice([1, 2, 3, -1, -2, Fraction(1, 2)]))
        d0 = Fraction(rng.choice([1, 2, -3, Fraction(2, 3)]))
        a = TSeries.constant(c0, 12) * exp_series(Fraction(rng.randint(-3, 3)), 12)
        b = TSeries.constant(d0, 12) * exp_series(Fraction(rng.randint(-3, 3)), 12)
        if not (in_log_constant_group(a) and in_log_constant_group(b)):
            return False, "generator failed membership"
        if not in_log_constant_group(a * b):
            return False, "product left the group"
        if not in_log_constant_group(1 / a):
            return False, "inverse left the group"
        # kernel of the log derivative inside the group is the constants
        if log_derivative(a).is_zero() and not a.is_constant():
            return False, "kernel element is not constant"
    return True, None


def _suite_fiber_linearity(rng, cases):
    X = counterexample_variety()
    W = restrict(delta_tangent(X, fiber_names=("u", "v")), diagonal_restriction())
    checked = 0
    while checked < cases:
        c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        reports = fiber_linearity_check(
            W,
            [(c, c)],
            order=10,
            scalars=(Fraction(rng.randint(-3, 3)), Fraction(rng.randint(1, 5), 2)),
        )
        if not reports[0].ok:
            return False, f"fiber linearity failed at ({c}, {c})"
        checked += 1
    return True, None


def check_property_suites(seed=3):
    suites = [
        ("hasse-product-rule", _suite_hasse, 100),
        ("leibniz-laws", _suite_leibniz, 100),
        ("jet-functoriality", _suite_functoriality, 100),
        ("log-derivative-homomorphism", _suite_log_derivative, 100),
        ("group-closure", _suite_group_closure, 100),
        ("fiber-linearity", _suite_fiber_linearity, 100),
    ]

    def run():
        rng = random.Random(seed)
        details = []
        for name, fn, cases in suites:
            ok, message = fn(rng, cases)
            if not ok:
                return False, f"{name}: {message}"
            details.append(f"{name}:{cases}")
        return True, " ".join(details)

    return _timed("property-suites", "randomized invariants, 100 cases each",
                  60.0, run)


# -- the runner -------------------------------------------------------------------


def run_all(seed=0):
    return [
        check_tangent_display(),
        check_restriction_display(),
        check_kernel_identity(),
        check_surjectivity_witnesses(),
        check_dimension_law(seed),
        check_tensor_pairing(seed + 1),
        check_product_decomposition(),
        check_constant_points_jets(),
        check_m1_crosscheck(),
        check_degree_step(seed + 2),
        check_series_oracles(),
        check_property_suites(seed + 3),
    ]
