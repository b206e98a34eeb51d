"""Exception types shared across the package."""


class IonbathError(Exception):
    """Base class for all package errors."""


class ConfigurationError(IonbathError):
    """Invalid parameter values, dimensions or config files."""


class UnitError(ConfigurationError):
    """A physical quantity was given without (or with a wrong) unit."""


class SingularDetuningError(IonbathError):
    """Closed-form drive expressions need a nonzero detuning."""


class CalibrationError(IonbathError):
    """Potential calibration could not reach the requested scattering length."""


class ResonanceError(CalibrationError):
    """Scattering length diverges inside the scanned bracket."""


class IntegrationError(IonbathError):
    """Time propagation failed (step underflow, max_steps exceeded, ...)."""


class FitError(IonbathError):
    """Nonlinear fit failed or the data is degenerate."""
