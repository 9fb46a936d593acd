"""Exception hierarchy: validation failures exit the CLI with code 2,
numeric failures with code 3."""


class ValidationError(ValueError):
    """Bad input: shapes, normalization, or a physical precondition."""


class NumericFailure(ArithmeticError):
    """A computation left the trustworthy numerical regime."""


class ForbiddenTransitionError(ValidationError):
    """Collapse onto a zero-probability target."""


class StepSizeError(ValidationError):
    """Integrator step too large for the requested accuracy."""


class NakedSingularityError(ValidationError):
    """Black-hole parameters with no horizon (discriminant < 0)."""
