"""Exception hierarchy shared by all heraldpdc modules."""


class HeraldError(Exception):
    """Base class for every error raised by heraldpdc."""


class OutOfRangeError(HeraldError, ValueError):
    """Wavelength outside the validity range of a dispersion model."""


class NotPhaseMatchableError(HeraldError, ValueError):
    """No real solution of the phase-matching condition exists."""


class SuperUnityHeraldingError(HeraldError, ValueError):
    """Loss correction would push the heralding efficiency above one."""


class EmptyResultError(HeraldError, ValueError):
    """A scan or grid produced no usable samples."""


class GeometryError(HeraldError, ValueError):
    """Collection optics cannot place a mode waist at the crystal."""


class FitError(HeraldError, RuntimeError):
    """Dip fitting failed (non-convergence or malformed trace)."""


class ConfigError(HeraldError, ValueError):
    """Invalid experiment configuration."""
