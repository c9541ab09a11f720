"""Exception hierarchy. Every error raised on purpose by the package derives
from FracHeatError so callers (and the CLI) can separate them from bugs."""


class FracHeatError(Exception):
    pass


class ParameterError(FracHeatError, ValueError):
    """A model or numerical parameter lies outside its admissible range."""


class RangeError(ParameterError):
    """Parameters fall outside the range where a stated bound applies."""


class ResolutionError(FracHeatError):
    """The grid is too coarse (or too short) for the requested accuracy."""

    def __init__(self, message, required_n=None, required_l=None):
        super().__init__(message)
        self.required_n = required_n
        self.required_l = required_l


class NumericalError(FracHeatError):
    """A quadrature or root search did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InputError(FracHeatError, ValueError):
    pass


class UsageError(FracHeatError):
    pass


class DegenerateDataError(InputError):
    pass


class BlowUpError(FracHeatError):
    def __init__(self, message, t_index=None, stream_id=None):
        super().__init__(message)
        self.t_index = t_index
        self.stream_id = stream_id


class ConfigError(FracHeatError):
    """Malformed run configuration; ``field`` is the dotted path of the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
