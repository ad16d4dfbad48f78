"""Exception types shared across the toolbox."""


class PoslpError(Exception):
    """Base class for all toolbox errors."""


class DimensionError(PoslpError):
    """Operands have incompatible or invalid dimensions."""


class SingularMatrixError(PoslpError):
    """Matrix is singular or too ill-conditioned to invert reliably."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ClassificationError(PoslpError):
    """Operation requires a structural property (Metzler, nonnegative) that fails."""


class StabilityError(PoslpError):
    """Operation requires a Hurwitz-stable system."""


class ModelError(PoslpError):
    """System data is missing pieces the operation needs (e.g. B/D for synthesis)."""


class ValidationError(PoslpError):
    """Malformed linear program or value object."""


class NonConvergenceError(PoslpError):
    """Iterative routine hit its iteration cap."""


class InfeasibleError(PoslpError):
    """A feasibility-style operation found the underlying program infeasible."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class DegreeError(PoslpError):
    """Polynomial degree exceeds what the operation supports."""


class CombinatorialCapError(PoslpError):
    """Enumeration would exceed the configured combinatorial cap."""


class WellPosednessError(PoslpError):
    """LFT loop I - Delta(delta) F00 is singular somewhere on the box."""


class DomainError(PoslpError):
    """Parameter outside its admissible range (e.g. delay-derivative bound >= 1)."""
