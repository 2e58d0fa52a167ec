"""Exception types shared across the package."""


class CurlhomError(Exception):
    """Base class for all package-specific errors."""


class ScenarioError(CurlhomError):
    """A scenario file failed to parse or validate.

    Carries the offending field path so CLI diagnostics can point at it.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class InvalidCoefficientError(CurlhomError):
    """Coefficient matrix failed the ellipticity spot-check or symmetry rules."""


class InvalidInputError(CurlhomError):
    """An operation received arguments outside its contract."""


class IllPosedDiscretisationError(CurlhomError):
    """A Galerkin system is singular beyond the kernel tolerance.

    ``offending_value`` holds the eigenvalue (or pivot) that triggered the
    failure, for diagnosis.
    """

    def __init__(self, message, offending_value=None):
        self.offending_value = offending_value
        super().__init__(message)


class DegenerateSubspaceError(CurlhomError):
    """A constrained eigenproblem has an empty (or fully null) trial subspace."""


class SolverConditioningError(CurlhomError):
    """A linear solve exceeded the admissible condition-number bound."""

    def __init__(self, message, cond_estimate=None):
        self.cond_estimate = cond_estimate
        super().__init__(message)
