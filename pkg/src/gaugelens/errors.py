"""Exception types raised across gaugelens."""


class GaugeLensError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(GaugeLensError, ValueError):
    pass


class DomainError(GaugeLensError, ValueError):
    pass


class SymmetryError(GaugeLensError, ValueError):
    pass


class NotPSDError(GaugeLensError, ValueError):
    pass


class DegenerateError(GaugeLensError, ValueError):
    """A vector, metric or representation is too close to zero to normalize."""


class ConvergenceError(GaugeLensError, ArithmeticError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TrainingDivergedError(GaugeLensError, ArithmeticError):
    def __init__(self, epoch):
        super().__init__(f"training loss became non-finite at epoch {epoch}")
        self.epoch = epoch


class InvarianceViolation(GaugeLensError):
    """The gauged model no longer computes the same function."""


class ConfigError(GaugeLensError, ValueError):
    pass
