"""Exception hierarchy shared by the analysis modules."""


class AlgCycleError(Exception):
    """Base class for all package errors."""


class ContextError(AlgCycleError, ValueError):
    """Operands live in incompatible arithmetic contexts (variables, parameter, radical)."""


class DomainError(AlgCycleError, ValueError):
    """A parameter or argument lies outside the region where a quantity is defined."""


class PreconditionError(AlgCycleError, ValueError):
    """Input data does not satisfy a documented precondition."""


class IntegrationError(AlgCycleError, RuntimeError):
    """The ODE integrator could not advance (step-size underflow, blow-up)."""

    def __init__(self, message, t=None, point=None):
        super().__init__(message)
        self.t = t
        self.point = point


class NoOrbitError(AlgCycleError, RuntimeError):
    """No return to the section was observed before the time cap."""


class ConvergenceError(AlgCycleError, RuntimeError):
    """An iterative solver (Newton/secant, quadrature refinement) failed to converge."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
