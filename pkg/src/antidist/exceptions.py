"""Exception hierarchy for antidist."""


class AntidistError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(AntidistError, ValueError):
    """Input does not satisfy the documented preconditions."""


class EigenvalueError(AntidistError, ArithmeticError):
    """Eigendecomposition failed or did not reach its residual bound."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class CertificateError(AntidistError):
    """A certificate could not be built or rounded into a verified one."""

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}
