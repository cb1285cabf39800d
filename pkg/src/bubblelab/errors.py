"""Exception and warning types shared across the package."""


class BubbleLabError(Exception):
    """Base class for all package-specific errors."""


class ExpressionParseError(BubbleLabError):
    """Raised when a coefficient expression cannot be parsed.

    Carries the 0-based character position of the offending token.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExpressionEvalError(BubbleLabError):
    """Raised when a coefficient expression cannot be evaluated (e.g. 1/0)."""


class RootFindingError(BubbleLabError):
    """Simultaneous root iteration failed to meet its residual target."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class FamilyError(BubbleLabError):
    """Invalid family specification or degenerate instantiated member."""


class PreconditionError(BubbleLabError):
    """An operation was called outside its stated domain of validity."""


class ProbeBallError(BubbleLabError):
    """No probe ball with the required margin exists on the search grid."""


class ComponentError(BubbleLabError):
    """Preimage-component tracing or root bookkeeping failed."""


class ClusterError(BubbleLabError):
    """Component tracks cannot be consistently grouped or ordered."""


class FitError(BubbleLabError):
    """Rescaling-limit fit failed (residual, degree or stability)."""


class AttachmentError(BubbleLabError):
    """Tree attachment point did not stabilize across the index ladder."""


class AdmissibilityError(PreconditionError):
    """An energy smallness hypothesis (<= 2*pi) is violated."""


class ConfigError(BubbleLabError):
    """Scenario configuration failed to parse or validate."""


class QuadratureBudgetWarning(UserWarning):
    """Cell budget exhausted; the partial value and achieved error are reported."""


class StabilityWarning(UserWarning):
    """A cross-index stability check exceeded its soft threshold."""
