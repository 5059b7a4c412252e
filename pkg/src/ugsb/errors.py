"""Exception types raised by the simulator."""


class UgsbError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(UgsbError):
    """Inconsistent parameters, level scheme, or scenario configuration."""


class UnsupportedFrameError(UgsbError):
    """Requested rotating frame is not defined for this register."""


class PerturbationInvalidError(UgsbError):
    """Second-order elimination is not trustworthy at these parameters."""


class DegenerateGateError(UgsbError):
    """Gate construction degenerates (zero effective coupling or rate)."""


class StiffnessError(UgsbError):
    """Adaptive integration step underflowed; the problem looks stiff."""


class IntegratorAccuracyError(UgsbError):
    """A post-run invariant (norm, trace, positivity) was violated."""


class FitError(UgsbError):
    """A diagnostic fit failed to find a clean oscillation."""
