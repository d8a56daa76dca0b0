"""Exception types shared across the package."""


class ModelError(ValueError):
    """Invalid model parameters or an operation applied to the wrong model class."""


class DomainError(ValueError):
    """Argument outside the analytic domain of a transform or special function."""


class StripViolation(DomainError):
    """Mellin/Laplace evaluation requested outside the convergence strip."""


class ConvergenceError(RuntimeError):
    """A numerical scheme failed to reach its accuracy target."""


class BracketError(RuntimeError):
    """A root solver could not bracket its root."""


class HorizonError(ValueError):
    """A path query beyond the simulated horizon."""
