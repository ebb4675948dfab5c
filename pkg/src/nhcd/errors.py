"""Exception taxonomy for the nhcd library.

Every error raised by the library derives from :class:`NhcdError`, so callers
can catch one base class. Numerical routines raise rather than silently
regularize: near an exceptional point the biorthonormal construction is
ill-conditioned and refusing is safer than emitting huge vectors.
"""

__all__ = [
    "NhcdError",
    "DegenerateSpectrum",
    "NonFinite",
    "SelfOrthogonal",
    "AmbiguousMatching",
    "DimensionMismatch",
    "BadSymmetryMatrix",
    "UnpairableSpectrum",
    "NotAnEigenvector",
    "NotOrthonormal",
    "NotBinormalized",
    "SymmetryViolation",
    "WindowExceeded",
    "StepTooLarge",
    "ZeroNorm",
    "GridMismatch",
    "EPCrossing",
    "ConfigError",
    "SchemaError",
]


class NhcdError(Exception):
    """Base class for all library errors."""


class DegenerateSpectrum(NhcdError):
    """Two eigenvalues closer than the exceptional-point guard."""


class NonFinite(NhcdError):
    """An input or result contains NaN or Inf."""


class SelfOrthogonal(NhcdError):
    """A left/right eigenvector pair has (near-)zero overlap.

    This is the numerical signature of an exceptional point: the
    binormalization factor 1/sqrt(overlap) diverges there.
    """


class AmbiguousMatching(NhcdError):
    """Eigenpath continuity matching could not be decided.

    The largest overlap per state does not dominate the second largest,
    which signals a time step too large or an eigenvalue crossing.
    """


class DimensionMismatch(NhcdError):
    """Operands have incompatible or unsupported dimensions."""


class BadSymmetryMatrix(NhcdError):
    """The symmetry matrix U is not unitary and Hermitian within tolerance."""


class UnpairableSpectrum(NhcdError):
    """No conjugation partner found for an eigenvalue within tolerance."""


class NotAnEigenvector(NhcdError):
    """A state fails the eigen-equation residual check."""


class NotOrthonormal(NhcdError):
    """An eigenpath expected to be orthonormal is not."""


class NotBinormalized(NhcdError):
    """An eigensystem expected to be binormalized is not."""


class SymmetryViolation(NhcdError):
    """A Hamiltonian fails its declared pseudo/antipseudo symmetry check."""


class WindowExceeded(NhcdError):
    """A time argument lies outside the schedule window."""


class StepTooLarge(NhcdError):
    """The integrator step violates the stability bound ||H||*h <= 0.1."""


class ZeroNorm(NhcdError):
    """A state norm vanished where a nonzero norm is required."""


class GridMismatch(NhcdError):
    """Two trajectories or tables do not share the same time grid."""


class EPCrossing(NhcdError):
    """A schedule crosses an exceptional point inside its window."""


class ConfigError(NhcdError):
    """An experiment configuration is missing, malformed, or out of range."""


class SchemaError(NhcdError):
    """A CSV or report file does not match the documented schema."""
