"""Exception types raised across the package."""


class QDPhononError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(QDPhononError, ValueError):
    """A physical or numerical parameter violates its invariant."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DomainError(QDPhononError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(QDPhononError, ValueError):
    """Array dimensions do not match the system truncation."""


class QuadratureError(QDPhononError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        self.error_estimate = error_estimate
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")


class IntegrationDivergedError(QDPhononError, RuntimeError):
    """A propagated state left its invariant tolerances."""

    def __init__(self, message: str, time: float):
        self.time = time
        super().__init__(f"{message} at t = {time!r} ps")


class ConfigError(QDPhononError, ValueError):
    """Scenario configuration failed validation."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
