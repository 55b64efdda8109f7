"""Exception hierarchy shared by every module of the package."""


class TQDError(Exception):
    """Base class for all errors raised by ``tqd``."""


class ArgumentError(TQDError, ValueError):
    """An argument is outside the documented domain of an operation."""


class CapacityError(TQDError):
    """A requested operator would exceed the configured dense-size cap."""


class NumericError(TQDError, ArithmeticError):
    """A linear-algebra routine failed to converge."""


class SingularityError(TQDError, ArithmeticError):
    """A closed-form expression hit a zero denominator (level crossing)."""


class DivergenceError(SingularityError):
    """The counterdiabatic term diverges because a coupled gap closed.

    Attributes
    ----------
    pair:
        The offending ``(l, m)`` level indices, when known.
    gap:
        The energy gap ``|E_m - E_l|`` at which the divergence was detected.
    """

    def __init__(self, message, pair=None, gap=None):
        super().__init__(message)
        self.pair = pair
        self.gap = gap


class DegeneracyError(TQDError):
    """A nondegenerate construction was handed a degenerate spectrum."""


class TrackingLossError(TQDError):
    """Eigenvectors could not be followed between consecutive frames."""


class LevelCrossingError(TrackingLossError):
    """Levels swapped order or the degeneracy pattern changed between frames."""


class IntegrationError(TQDError):
    """The time integrator drifted off the unit sphere."""
