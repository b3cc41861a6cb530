"""Exception hierarchy shared by the tuning, simulation and CLI layers."""


class CplmfcError(Exception):
    """Base class for all package errors."""


class ParameterError(CplmfcError, ValueError):
    """Invalid or non-finite parameters passed to a numerical primitive."""


class DomainError(CplmfcError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ConfigError(CplmfcError, ValueError):
    """Malformed scenario or configuration.

    ``line`` carries the 1-based line number in the source file when known.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class SimulationFault(CplmfcError, RuntimeError):
    """Non-finite state or signal produced inside a simulation step."""


class IdentificationError(CplmfcError, RuntimeError):
    """Settling-time identification did not produce a usable result."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SafetyAbort(IdentificationError):
    """Identification probe drove the plant output beyond its safety bound."""


class InstabilityError(CplmfcError, RuntimeError):
    """Closed loop diverged; ``trace`` holds the samples recorded so far."""

    def __init__(self, message, trace=None, sample=None):
        super().__init__(message)
        self.trace = trace
        self.sample = sample
