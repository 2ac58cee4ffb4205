"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: invalid parameters -> 2, infeasible
generation -> 3, file/parse problems -> 4.
"""


class OcbenchError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParamsError(OcbenchError, ValueError):
    """A parameter violates a documented constraint."""


class InfeasibleError(OcbenchError, RuntimeError):
    """The requested generation target cannot be met (e.g. too few
    eligible outlier nodes, community sizes that cannot sum to the
    target, or rewiring that cannot produce a simple graph)."""


class ParseError(OcbenchError, ValueError):
    """An input file could not be parsed."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class ConvergenceError(OcbenchError, RuntimeError):
    """An iterative method hit its iteration cap before converging."""


class DegenerateClassError(OcbenchError, ValueError):
    """AUC requested but one of the two classes is empty."""
