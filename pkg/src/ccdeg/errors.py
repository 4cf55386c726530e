"""Exception hierarchy shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ToolkitError):
    """A point lies outside the domain box of a map or problem."""


class CoverError(ToolkitError):
    """No declared region contains a point of the domain."""


class ExprParseError(ToolkitError):
    """Expression or scenario text failed to parse.

    Carries 1-based ``line`` and ``col`` attributes for diagnostics.
    """

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.line = line
        self.col = col

    def __str__(self) -> str:
        base = super().__str__()
        if self.line:
            return f"line {self.line}, col {self.col}: {base}"
        return base


class ConvergenceError(ToolkitError):
    """An iterative approximation failed to stabilize.

    ``trace`` holds whatever partial evidence the caller accumulated.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class NotWellDefinedError(ToolkitError):
    """A degree query cannot be answered: zero meets the boundary data."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class RefinementExhaustedError(ToolkitError):
    """Boundary refinement hit its sample budget before the angle criterion."""


class SplitFailureError(ToolkitError):
    """A bisection cut could not be perturbed off a zero within budget."""


class UnclassifiedContactError(ToolkitError):
    """A trajectory reached a discontinuity curve that is neither viable nor inviable."""


class QuadratureError(ToolkitError):
    """Adaptive quadrature failed to converge on some subinterval."""

    def __init__(self, message: str, interval=None):
        super().__init__(message)
        self.interval = interval


class ScenarioError(ToolkitError):
    """A scenario file is syntactically or semantically invalid."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(message)
        self.line = line

    def __str__(self) -> str:
        base = super().__str__()
        if self.line:
            return f"line {self.line}: {base}"
        return base
