"""Truncated formal power series in one variable t over the rationals.

A series carries an explicit guaranteed order (`prec`): the coefficients of
t^0 .. t^prec are exact and nothing is claimed beyond.  Every operation
records the guaranteed order of its result, e.g. differentiating a
precision-N series yields precision N-1, while sums, products and divisions
keep the minimum of the input precisions.  The derivation is d/dt and its
constants are exactly the degree-0 series, i.e. plain rationals.

Equality between two series means agreement through the smaller of the two
guaranteed orders; comparing against an int or Fraction lifts the scalar to
a constant series first.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DimensionMismatch, InsufficientPrecision, NonUnitDivisor

#: Default guaranteed order used when none is requested explicitly.
DEFAULT_PRECISION = 24


class TSeries:
    """A truncated power series c0 + c1*t + ... + cN*t^N + O(t^(N+1))."""

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs, prec):
        if prec < 0:
            raise InsufficientPrecision("series precision must be >= 0")
        cs = [Fraction(c) for c in list(coeffs)[: prec + 1]]
        cs.extend([Fraction(0)] * (prec + 1 - len(cs)))
        self.coeffs = tuple(cs)
        self.prec = prec

    @classmethod
    def constant(cls, value, prec=DEFAULT_PRECISION):
        return cls([Fraction(value)], prec)

    @classmethod
    def zero(cls, prec=DEFAULT_PRECISION):
        return cls([], prec)

    @classmethod
    def var(cls, prec=DEFAULT_PRECISION):
        """The series t."""
        return cls([0, 1], prec)

    # -- coercion -----------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, TSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return TSeries.constant(other, self.prec)
        return None

    # -- queries ------------------------------------------------------------

    @property
    def constant_term(self):
        return self.coeffs[0]

    def is_unit(self):
        return self.coeffs[0] != 0

    def is_constant(self):
        return all(c == 0 for c in self.coeffs[1:])

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def order(self):
        """Index of the first nonzero coefficient, or None if zero to precision."""
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return None

    def at_precision(self, prec):
        """The same series with guaranteed order lowered to `prec`."""
        if prec > self.prec:
            raise InsufficientPrecision(
                f"cannot raise precision from {self.prec} to {prec}"
            )
        return TSeries(self.coeffs, prec)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = min(self.prec, o.prec)
        return TSeries([a + b for a, b in zip(self.coeffs, o.coeffs)], n)

    __radd__ = __add__

    def __neg__(self):
        return TSeries([-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.__add__(-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = min(self.prec, o.prec)
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            a = self.coeffs[i]
            if a == 0:
                continue
            for j in range(n + 1 - i):
                b = o.coeffs[j]
                if b != 0:
                    out[i + j] += a * b
        return TSeries(out, n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.coeffs[0] == 0:
            raise NonUnitDivisor("divisor has zero constant term")
        n = min(self.prec, o.prec)
        inv0 = Fraction(1) / o.coeffs[0]
        out = []
        for k in range(n + 1):
            acc = self.coeffs[k]
            for j in range(k):
                if out[j] != 0 and o.coeffs[k - j] != 0:
                    acc -= out[j] * o.coeffs[k - j]
            out.append(acc * inv0)
        return TSeries(out, n)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = TSeries.constant(1, self.prec)
        base = self
        k = n
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derive(self):
        """Termwise d/dt; the result is guaranteed one order less."""
        if self.prec == 0:
            raise InsufficientPrecision("cannot differentiate a precision-0 series")
        out = [(k + 1) * self.coeffs[k + 1] for k in range(self.prec)]
        return TSeries(out, self.prec - 1)

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = min(self.prec, o.prec)
        return self.coeffs[: n + 1] == o.coeffs[: n + 1]

    __hash__ = None

    def __bool__(self):
        return not self.is_zero()

    # -- rendering -----------------------------------------------------------

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                mono = ""
            elif k == 1:
                mono = "t"
            else:
                mono = f"t^{k}"
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        tail = f"O(t^{self.prec + 1})"
        if not parts:
            return f"0 + {tail}"
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return f"{text} + {tail}"

    def __repr__(self):
        return f"TSeries({self})"


def exp_series(c, prec=DEFAULT_PRECISION):
    """The solution of y' = c*y with y(0) = 1: coefficient k is c^k / k!."""
    c = Fraction(c)
    out = [Fraction(1)]
    for k in range(prec):
        out.append(out[-1] * c / (k + 1))
    return TSeries(out, prec)


# -- matrices of series ------------------------------------------------------


def series_matrix(rows, prec=DEFAULT_PRECISION):
    """Lift a rectangular array of scalars/series to a TSeries matrix."""
    out = []
    for row in rows:
        out.append(
            [e if isinstance(e, TSeries) else TSeries.constant(e, prec) for e in row]
        )
    return out


def mat_vec(A, v):
    if any(len(row) != len(v) for row in A):
        raise DimensionMismatch("matrix/vector size mismatch")
    out = []
    for row in A:
        acc = None
        for a, x in zip(row, v):
            term = a * x
            acc = term if acc is None else acc + term
        out.append(acc)
    return out

def mat_mul(A, B):
    if not B or any(len(row) != len(B) for row in A):
        raise DimensionMismatch("matrix size mismatch")
    cols = len(B[0])
    return [
        [
            _dot([A[i][k] for k in range(len(B))], [B[k][j] for k in range(len(B))])
            for j in range(cols)
        ]
        for i in range(len(A))
    ]


def _dot(xs, ys):
    acc = None
    for x, y in zip(xs, ys):
        term = x * y
        acc = term if acc is None else acc + term
    return acc


def transpose(A):
    return [list(col) for col in zip(*A)]


def fundamental_matrix(A, order):
    """Fundamental solution of Y' = A(t) Y with Y(0) = I.

    The coefficient recursion Y_(k+1) = (A Y)_k / (k+1) is run on rational
    coefficient matrices, so only the genuinely needed convolutions are
    formed.  The entries of A must be guaranteed through order `order`-1;
    the result is guaranteed through `order` and its columns form a basis of
    the solution space over the constants.
    """
    d = len(A)
    if any(len(row) != d for row in A):
        raise DimensionMismatch("fundamental_matrix needs a square matrix")
    if order < 0:
        raise InsufficientPrecision("order must be >= 0")
    if d == 0:
        return []
    aprec = min(e.prec for row in A for e in row)
    if aprec < order - 1:
        raise InsufficientPrecision(
            f"matrix entries guaranteed to order {aprec}, need {order - 1}"
        )
    # Coefficient matrices of A, trimmed to the nonzero support.
    acoeffs = []
    for i in range(min(aprec, max(order - 1, 0)) + 1):
        Ai = [[A[r][c].coeffs[i] for c in range(d)] for r in range(d)]
        acoeffs.append(Ai)
    while acoeffs and all(x == 0 for row in acoeffs[-1] for x in row):
        acoeffs.pop()

    ident = [
        [Fraction(1) if i == j else Fraction(0) for j in range(d)] for i in range(d)
    ]
    phis = [ident]
    for k in range(order):
        acc = [[Fraction(0)] * d for _ in range(d)]
        for i, Ai in enumerate(acoeffs):
            if i > k:
                break
            Pk = phis[k - i]
            for r in range(d):
                Ar = Ai[r]
                accr = acc[r]
                for s in range(d):
                    a = Ar[s]
                    if a == 0:
                        continue
                    Ps = Pk[s]
                    for c in range(d):
                        if Ps[c] != 0:
                            accr[c] += a * Ps[c]
        inv = Fraction(1, k + 1)
        phis.append([[x * inv for x in row] for row in acc])

    return [
        [TSeries([phis[k][r][c] for k in range(order + 1)], order) for c in range(d)]
        for r in range(d)
    ]


def horizontal_test(v, A):
    """Check v' = A v to guaranteed precision.

    Returns (True, constants) where `constants` are the coordinates of v in
    the fundamental basis (necessarily constant), or (False, None).
    """
    d = len(v)
    if len(A) != d or any(len(row) != d for row in A):
        raise DimensionMismatch("horizontal_test needs matching dimensions")
    lhs = [x.derive() for x in v]
    rhs = mat_vec(A, v)
    if not all(a == b for a, b in zip(lhs, rhs)):
        return False, None
    nv = min(x.prec for x in v)
    na = min(e.prec for row in A for e in row)
    order = min(nv, na + 1)
    # Psi = Phi^{-1}: solves Psi' = -Psi A with Psi(0) = I, obtained from the
    # fundamental matrix of -A^T by transposing.
    neg_at = [[-A[c][r] for c in range(d)] for r in range(d)]
    psi = transpose(fundamental_matrix(neg_at, order))
    coords = mat_vec(psi, v)
    for x in coords:
        if not x.is_constant():
            raise InsufficientPrecision(
                "solution coordinates failed to be constant at this precision"
            )
    return True, [x.constant_term for x in coords]
