from typing import Any


class StarSpectralError(Exception):
    pass


class InvalidInputError(StarSpectralError, ValueError):
    pass


class ConfigError(InvalidInputError):
    pass


class OutOfRangeError(StarSpectralError, ValueError):
    def __init__(self, message: str, lam: complex | None = None, limit: float | None = None) -> None:
        super().__init__(message)
        self.lam = lam
        self.limit = limit


class PoleProximityError(StarSpectralError, ValueError):
    def __init__(self, message: str, lam: complex, eigenvalue: float) -> None:
        super().__init__(message)
        self.lam = lam
        self.eigenvalue = eigenvalue


class NearSingularError(StarSpectralError, ValueError):
    def __init__(self, message: str, lam: complex) -> None:
        super().__init__(message)
        self.lam = lam


class NumericalFailureError(StarSpectralError, RuntimeError):
    pass


class IndexingError(NumericalFailureError):
    def __init__(self, message: str, shell: int, found: int, expected: int) -> None:
        super().__init__(message)
        self.shell = shell
        self.found = found
        self.expected = expected


class ConversionError(NumericalFailureError):
    pass


class NoConvergenceError(NumericalFailureError):
    def __init__(self, message: str, trace: list[Any]) -> None:
        super().__init__(message)
        self.trace = trace


class OracleFailureError(NumericalFailureError):
    pass


class ReportIOError(StarSpectralError, OSError):
    pass
