"""Exception hierarchy shared by every module of the package."""


class HenonError(Exception):
    """Base class for all errors raised by :mod:`henon`."""


class ConstraintViolation(HenonError, ValueError):
    """A parameter set violates one of the admissibility conditions."""


class DomainError(HenonError, ValueError):
    """A function was evaluated outside of its domain."""


class GridMismatch(HenonError, ValueError):
    """Profiles that should share a grid do not."""


class NumericalFailure(HenonError, RuntimeError):
    """Base class for failures of an iterative or discretised computation."""


class BlowUp(NumericalFailure):
    """A radial solution exceeded the configured cap."""


class NoConvergence(NumericalFailure):
    """A fixed point or Newton iteration did not converge."""


class TailNotResolved(NumericalFailure):
    """An asymptotic tail fit has residual above tolerance."""


class NoPositiveRoot(NumericalFailure):
    """The synchronisation scan found no positive root."""


class NotProportional(HenonError, ValueError):
    """Two initial data vectors are not positive multiples of each other."""


class NotASyncRoot(HenonError, ValueError):
    """A coefficient pair does not solve the synchronisation system."""


class SymmetryBreakingRegime(HenonError, ValueError):
    """Radial computation refused: the extremal is not radially symmetric."""


class GridTooCoarse(NumericalFailure):
    """Eigenvalues on two nested grids disagree beyond tolerance."""


class VanishedSolution(UserWarning):
    """A component of a radial solution reached zero before ``r_max``."""


class IoError(HenonError, OSError):
    """A report could not be written."""
