"""Exception types raised across the package."""


class PintimeError(Exception):
    """Base class for all library errors."""


class NoRealRoot(PintimeError, ArithmeticError):
    """The implicit step equation has no real solution (blow-up inside the step)."""

    def __init__(self, message, y=None, dt=None):
        super().__init__(message)
        self.y = y
        self.dt = dt


class SingularSystem(PintimeError, ArithmeticError):
    """An implicit linear solve failed."""


class NonIntegerStepCount(PintimeError, ValueError):
    """An interval is not an integer multiple of the requested step."""


class DuplicateNodes(PintimeError, ValueError):
    """Interpolation nodes are not distinct."""


class BadGrid(PintimeError, ValueError):
    """A spatial grid parameter is inconsistent."""


class RankDeficient(PintimeError, ValueError):
    """The least-squares design matrix does not have full column rank."""


class TaskError(PintimeError):
    """A task inside ``parallel_map`` failed.

    ``index`` is the task index and ``label`` an optional human-readable
    attribution (for example ``"slice 3, sample 2 (xi=1.5)"``).
    """

    def __init__(self, index, cause, label=None):
        where = label if label is not None else f"task {index}"
        super().__init__(f"{where} failed: {cause}")
        self.index = index
        self.label = label
        self.cause = cause
