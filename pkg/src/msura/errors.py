"""Exception types raised across the package."""


class MsuraError(Exception):
    """Base class for all package errors."""


class ParameterError(MsuraError, ValueError):
    """A function argument is out of its valid range."""


class ConfigError(MsuraError, ValueError):
    """A system configuration is internally inconsistent."""


class InputError(MsuraError, ValueError):
    """Array input has the wrong shape or contains invalid values."""


class InfeasibleError(MsuraError, RuntimeError):
    """A numerical design problem has no admissible solution."""


class DegenerateEstimateError(MsuraError, ArithmeticError):
    """A channel estimate is zero, so combining weights are undefined."""
