"""Exception types shared across the engine."""


class DjetsError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(DjetsError):
    """Operands have incompatible shapes or variable counts."""


class NonUnitDivisor(DjetsError):
    """Division by a truncated series whose constant term is zero."""


class InsufficientPrecision(DjetsError):
    """Inputs do not carry enough guaranteed orders for the request."""


class SingularPivot(DjetsError):
    """No unit pivot is available while eliminating over the series field.

    Signals a non-generic base point rather than silently reduced precision.
    """


class PointNotOnVariety(DjetsError):
    """A base point fails the defining equations."""


class BasePointMismatch(DjetsError):
    """A morphism does not send the source base point to the target one."""


class NonTriangular(DjetsError):
    """Algebraic substitution rules do not form a triangular system."""


class MissingRule(DjetsError):
    """A derivative symbol has no rewrite under the substitution system."""


class InvarianceViolation(DjetsError):
    """The induced derivation does not preserve the jet subspace.

    Raised when either the section is invalid or the working precision is
    too low to witness invariance.
    """


class DecompositionFailure(DjetsError):
    """A product jet does not decompose with constant coefficients."""


class ZeroInput(DjetsError):
    """An operand required to be nonzero is zero."""


class ParseError(DjetsError):
    def __init__(self, message, line=None, col=None):
        loc = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.col = col


class ArityError(DjetsError):
    """A declared list has the wrong length for its context."""


class UnknownName(DjetsError):
    """A reference to an undeclared block, point, or variable."""
