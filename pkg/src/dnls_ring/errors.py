"""Exception hierarchy shared across the package."""


class DnlsRingError(Exception):
    """Base class for all package errors."""


class ConfigError(DnlsRingError):
    """Invalid lattice/potential/run configuration."""


class DomainError(DnlsRingError):
    """Potential evaluated outside its domain (e.g. saturable log at s <= -1)."""


class DegenerateAmplitudeError(DnlsRingError):
    """Amplitude fails the non-degeneracy conditions; names the failing one."""


class ResonanceError(DnlsRingError):
    """Onset is resonant (double eigenvalue / suppressed 1:l onset)."""


class ConvergenceError(DnlsRingError):
    """A Newton or fixed-point solve failed to converge."""
