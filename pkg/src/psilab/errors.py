"""Exception types shared across the package."""


class PsilabError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(PsilabError, ValueError):
    """Inputs violate a structural contract (shape, sign, range)."""


class ConfigurationError(PsilabError, ValueError):
    """A requested setup cannot be represented on the given grid."""


class DegenerateStateError(PsilabError, ValueError):
    """Operation undefined for an (almost) everywhere-zero field."""


class UnsupportedMethodError(PsilabError, ValueError):
    """A route was requested that the operands do not support."""


class NumericalError(PsilabError, RuntimeError):
    """A numerical procedure failed; the message carries diagnostics."""


class DivergenceError(NumericalError):
    """Propagation produced non-finite values."""

    def __init__(self, message: str, step: int | None = None, time: float | None = None):
        super().__init__(message)
        self.step = step
        self.time = time


class DensityFloorError(NumericalError):
    """Density fell below the nodeless-regime hard floor."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class ScenarioParseError(PsilabError, ValueError):
    """Scenario text rejected; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
