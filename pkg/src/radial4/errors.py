"""Exception taxonomy shared across the package.

Every library-raised error derives from Radial4Error so callers (and the
CLI exit-code mapping) can tell solver failures apart from bugs.
"""

from __future__ import annotations


class Radial4Error(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(Radial4Error):
    """Inputs violate a documented precondition (bad parameters, bad grid)."""


class DomainError(Radial4Error):
    """A quantity left its mathematical domain (negative v, bad radicand)."""


class PoleError(DomainError):
    """Gamma/Beta evaluated at a nonpositive-integer pole."""


class TailError(Radial4Error):
    """A weighted integral does not decay at the quadrature window ends."""

    def __init__(self, message: str, end: str = "", end_value: float = 0.0):
        super().__init__(message)
        self.end = end
        self.end_value = end_value


class BracketError(Radial4Error):
    """A root scan failed to bracket a sign change."""


class ConvergenceError(Radial4Error):
    """An iteration hit its budget without meeting its tolerance."""


class RegimeError(Radial4Error):
    """Parameters lie outside the regime the requested solver supports."""


class NoExplicitSolutionError(RegimeError):
    """Coefficients do not satisfy the closed-form solvability relation."""


class BlowUpError(Radial4Error):
    """Integration escaped to infinity; carries the escape time."""

    def __init__(self, message: str, escape_time: float, trajectory=None):
        super().__init__(message)
        self.escape_time = escape_time
        self.trajectory = trajectory


class StepFailureError(Radial4Error):
    """Adaptive step size underflowed before reaching the target time."""


class TrajectoryDomainError(DomainError):
    """The integrated solution crossed v = 0; carries the partial trajectory."""

    def __init__(self, message: str, crossing_time: float, trajectory=None):
        super().__init__(message)
        self.crossing_time = crossing_time
        self.trajectory = trajectory
