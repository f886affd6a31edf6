"""Exception hierarchy for spherepd."""


class SpherePDError(Exception):
    """Base class for all library errors."""


class DomainError(SpherePDError, ValueError):
    """An argument lies outside the domain of the operation."""


class ParityError(DomainError):
    """Kernel indices j and n do not have matching parity."""


class DimensionError(DomainError):
    """The operation is not defined in the requested sphere dimension."""


class QuadratureError(SpherePDError, RuntimeError):
    """Quadrature self-checks failed."""


class DivergenceError(SpherePDError, ArithmeticError):
    """A moment sum does not converge at the available truncation."""


class StepUnderflowError(SpherePDError, ValueError):
    """A finite-difference stencil would leave the admissible interval."""


class DerivativeUnavailableError(SpherePDError):
    """A required derivative can neither be read from metadata nor estimated."""


class ConvergenceError(SpherePDError, RuntimeError):
    """A series failed to converge within its term budget."""


class ConstructionError(SpherePDError, RuntimeError):
    """A multi-step construction could not be completed."""


class DegenerateInputError(SpherePDError, ValueError):
    """The input is excluded by the operation (for example psi identically 1)."""
