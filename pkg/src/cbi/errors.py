"""Exception types shared across the package."""


class CbiError(Exception):
    """Base class for all package-specific errors."""


class QuadratureFailure(CbiError):
    """Adaptive quadrature could not reach the requested tolerance."""


class EmptyRegion(CbiError):
    """Sampling was requested from a region carrying zero mass."""


class InfiniteMass(CbiError):
    """Sampling was requested from a region carrying infinite mass."""


class DimensionMismatch(CbiError):
    """Structurally inconsistent dimensions in a parameter tuple."""


class StepSizeUnderflow(CbiError):
    """ODE step control drove the step size below the admissible floor."""


class InvalidConfig(CbiError):
    """Simulation configuration violates its invariants."""


class PreconditionViolated(CbiError):
    """An operation precondition (ordering, admissibility) does not hold."""


class BudgetExceeded(CbiError):
    """A verification run would exceed its computational budget."""
