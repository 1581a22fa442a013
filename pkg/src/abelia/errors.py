"""Exception hierarchy. Every failure mode that callers are expected to
handle gets its own class; anything else is a plain ValueError."""


class AbeliaError(Exception):
    pass


class MalformedInput(AbeliaError):
    """Input JSON/values do not match the documented schemas."""


class RootFindingFailure(AbeliaError):
    """Simultaneous root iteration did not converge at the requested precision."""


class SearchBudgetExceeded(AbeliaError):
    """Exhaustive confirmation range larger than the configured budget."""


class SingularCocycle(AbeliaError):
    """|det(C*tau + D)| below the working-precision cutoff."""


class ReductionDiverged(AbeliaError):
    """Fundamental-domain reduction exceeded its step budget."""


class NotAnEndomorphism(AbeliaError):
    """Integer matrix does not preserve the complex structure of the variety."""


class NotAHomomorphism(AbeliaError):
    """Integer matrix does not intertwine the complex structures."""


class NotAPerfectSquare(AbeliaError):
    """Rational characteristic polynomial has no polynomial square root.

    Signals an upstream validation bug: for a validated endomorphism the
    square root always exists.
    """


class ComplexRootDetected(AbeliaError):
    """A root that must be real came out complex (implementation bug signal)."""


class BoundViolation(AbeliaError):
    """A proved norm inequality failed numerically; carries a reproduction payload."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload or {}


class NoRationalTwoTorsion(AbeliaError):
    """Curve has no rational point of order two at the requested abscissa."""


class ToleranceUnreachable(AbeliaError):
    """Doubling budget cannot certify the requested tolerance."""


class ScalingViolation(BoundViolation):
    """Canonical-height scaling ratio left the proved window."""


class IdentityViolation(BoundViolation):
    """Canonical-height isogeny identity failed beyond tolerance."""
