"""Exception hierarchy shared by the services and the command line."""
from typing import Optional


class JunctionError(Exception):
    """Base class for every failure raised by the junction package."""


class DomainError(JunctionError):
    def __init__(self, constraint: str, message: str):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}")


class PreconditionError(JunctionError):
    pass


class ClassificationError(JunctionError):
    pass


class SingularityError(JunctionError):
    pass


class QuadratureError(JunctionError):
    pass


class LinearSolveError(JunctionError):
    pass


class GridMismatchError(JunctionError):
    pass


class ConfigError(JunctionError):
    pass


class NonConvergence(JunctionError):
    def __init__(self, message: str, best_residual: float, progress: Optional[float] = None):
        self.best_residual = best_residual
        self.progress = progress
        detail = f"{message} (best residual {best_residual:.3e}"
        if progress is not None:
            detail += f", continuation reached {100.0 * progress:.1f}%"
        super().__init__(detail + ")")
