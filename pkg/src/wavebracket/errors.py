"""Exception types and warning categories shared across the package."""


class WavebracketError(Exception):
    """Base class for all package errors."""


class SingularMatrix(WavebracketError):
    """Matrix has zero (or numerically zero) determinant."""


class NotExpanding(WavebracketError):
    """Some eigenvalue modulus is <= 1 + eps; not a dilation matrix."""


class LevelOverflow(WavebracketError):
    """Requested level |n| exceeds the conditioning bound."""


class SupportClipped(WavebracketError):
    """Signal support does not fit the requested box/grid."""


class DomainMismatch(WavebracketError):
    """Operation received a signal in the wrong domain (time vs frequency)."""


class IncompatibleGrids(WavebracketError):
    """Grid signals cannot be brought onto a common refinement."""


class GridMismatch(WavebracketError):
    """Torus grid does not match the operation's expectations."""


class TailTooLarge(WavebracketError):
    """Truncated lattice sum has a last-shell contribution above tolerance."""


class WrongWaveletCount(WavebracketError):
    """Number of wavelets does not match index m - 1."""


class UnknownName(WavebracketError):
    """Unknown builtin wavelet family name."""


class Divergence(WavebracketError):
    """Cascade iteration step norms grew for three consecutive iterations."""


class RangeTooSmall(WavebracketError):
    """Level window leaves more energy outside than the tolerance allows."""


class Unsupported(WavebracketError):
    """Requested representation/operation is deliberately not provided."""


class WindowTooSmall(UserWarning):
    """Bracket window provably misses nonzero coefficients."""


# Errors that indicate bad input rather than a numeric failure; the CLI maps
# these to exit code 2 and the service to HTTP 422.
VALIDATION_ERRORS = (
    SingularMatrix,
    NotExpanding,
    LevelOverflow,
    SupportClipped,
    DomainMismatch,
    IncompatibleGrids,
    GridMismatch,
    WrongWaveletCount,
    UnknownName,
    Unsupported,
)

# Numeric failures; CLI exit code 3, HTTP 409.
NUMERIC_ERRORS = (TailTooLarge, Divergence, RangeTooSmall)
