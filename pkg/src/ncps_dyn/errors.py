class NCPSError(Exception):
    """Base class for errors raised by ncps_dyn."""


class ValidationError(NCPSError, ValueError):
    """Invalid input or configuration."""


class DomainError(NCPSError, ValueError):
    """Evaluation outside the domain of a function (e.g. at the field singularity)."""


class NumericalError(NCPSError, ArithmeticError):
    """Failure during numerical integration.

    ``t`` and ``state`` hold the last valid time and state vector when known.
    """

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class SingularityError(NumericalError):
    """Trajectory came within the guard radius of the gravitating center."""


class StepSizeUnderflow(NumericalError):
    """Adaptive step size fell below the representable resolution."""
