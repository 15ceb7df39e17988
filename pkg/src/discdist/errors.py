"""Exception types shared across the package."""


class DiscDistError(Exception):
    """Base class for all package errors."""


class ShapeError(DiscDistError, ValueError):
    """Dimension or degree mismatch between operands."""


class DegreeError(DiscDistError, ValueError):
    """Degree out of the supported range or too small for an operation."""


class ConditioningError(DiscDistError, ArithmeticError):
    """A matrix that should be well conditioned is numerically singular."""


class NotOrthogonalError(DiscDistError, ValueError):
    pass


class ParseError(DiscDistError, ValueError):
    """Malformed polynomial text file."""


class SearchFailure(DiscDistError, RuntimeError):
    """No restart of a multi-start search converged."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DegenerateError(DiscDistError, ValueError):
    """The polynomial lies (numerically) on the discriminant."""


class NotQuasiSingularError(DiscDistError, ValueError):
    pass


class InconsistentClassificationError(DiscDistError, ValueError):
    pass


class ImpossibleKindError(DiscDistError, ValueError):
    pass


class CertificateInapplicableError(DiscDistError, ValueError):
    pass


class DomainError(DiscDistError, ValueError):
    """Parameters outside the domain where a formula is valid."""
