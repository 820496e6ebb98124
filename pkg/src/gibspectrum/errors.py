"""Exception types shared across the solvers."""


class GibSpectrumError(Exception):
    """Base class for solver errors."""


class DegenerateMultiplierError(GibSpectrumError):
    """lambda_c is exactly 0 or 1, where the branch algebra divides by zero."""


class IndeterminateRegionError(GibSpectrumError):
    """Neither stationary branch reproduces the queried point."""


class InfeasibleChannelError(GibSpectrumError):
    """The channel carries no information (all squared gains are zero)."""


class NonConvergenceError(GibSpectrumError):
    """The solver exhausted its budget; ``report`` holds the best attempt."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
