"""Exception hierarchy shared by all fint modules."""


class FintError(Exception):
    """Base class for every error raised by the package."""


class DomainError(FintError, ArithmeticError):
    """Evaluation hit a singular point (pole, log of non-positive, branch cut)."""


class ParseError(FintError, ValueError):
    """Malformed scalar expression text.

    Attributes:
        offset: byte offset of the offending token in the UTF-8 input.
    """

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


class QuadratureError(FintError):
    """Adaptive quadrature failed to converge."""


class TrajectoryError(FintError):
    """The trajectory integrator could not continue (step-size collapse, blow-up)."""


class SpectralError(FintError):
    """Eigen/Jordan structure could not be determined reliably."""


class SpecError(FintError, ValueError):
    """Invalid system description (schema, shapes, window)."""


class ClassificationError(FintError):
    """No supported system class matches the input."""


class ConstructionError(FintError):
    """A constructor's hypotheses are not met."""


class VerificationError(FintError):
    """The verification harness could not produce a verdict."""
