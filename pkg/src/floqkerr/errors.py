"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(ToolkitError):
    """Operators or states built on different Fock cutoffs were combined."""


class TailTooHeavy(ToolkitError):
    """Requested occupation puts more than 1e-10 of the population above the cutoff."""


class StepTooLarge(ToolkitError):
    """Master-equation trace drift exceeded 1e-6 in one drive period."""


class ExpFailure(ToolkitError):
    """Neither matrix-exponential path produced a finite propagator."""


class DegenerateSteady(ToolkitError):
    """Two propagator eigenvalues lie within 1e-8 of 1; no unique steady state."""


class NotPositive(ToolkitError):
    """A density matrix has an eigenvalue below the allowed negativity floor."""


class NoRealEigenvalue(ToolkitError):
    """No nonzero effective eigenvalue is real; the real-axis gap is undefined."""


class EmptyOrbit(ToolkitError):
    """A phase-space metric was asked for against an orbit with no samples."""


class Diverged(ToolkitError):
    """A mean-field trajectory left the |alpha| <= 1e3 guard disk."""


class TooFewPoints(ToolkitError):
    """A fit was requested with fewer than the minimum number of points."""


class ConfigInvalid(ToolkitError):
    """A run configuration is missing or malformed; pinpoints the offending key."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = ""
        if key is not None:
            where += f" [key: {key}]"
        if line is not None:
            where += f" [line {line}]"
        super().__init__(message + where)
