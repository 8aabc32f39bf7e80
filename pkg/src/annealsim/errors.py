"""Exception types shared across the package."""


class AnnealSimError(Exception):
    """Base class for errors raised by this package."""


class ModelError(AnnealSimError, ValueError):
    """Invalid Ising model specification."""


class SizeError(ModelError):
    """Problem size outside the supported qubit range."""


class ScheduleError(AnnealSimError, ValueError):
    """Invalid annealing schedule definition or lookup."""


class ScheduleParseError(ScheduleError):
    """Malformed schedule CSV file."""


class SolverConfigError(AnnealSimError, ValueError):
    """Unsupported solver configuration."""


class NumericalError(AnnealSimError, RuntimeError):
    """Numerical consistency failure during a simulation."""


class ConvergenceError(NumericalError):
    """Adaptive step doubling exhausted without meeting the tolerances.

    Carries the step-doubling history as a list of
    ``(n_steps, error_max, error_mean)`` tuples.
    """

    def __init__(self, message: str, trace):
        super().__init__(message)
        self.trace = list(trace)


class BqpjsonError(AnnealSimError, ValueError):
    """Malformed or unsupported problem file."""
