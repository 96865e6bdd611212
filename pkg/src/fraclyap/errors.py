"""Exception and warning types shared across the package."""


class EvaluationError(ArithmeticError):
    """A special-function series did not converge within its term budget."""


class DivergenceError(RuntimeError):
    """A time stepper produced a non-finite state."""

    def __init__(self, step: int, t: float):
        self.step = step
        self.t = t
        super().__init__(f"non-finite state at step {step} (t = {t:g})")


class CorrectorError(RuntimeError):
    """An implicit corrector iteration did not reach its tolerance."""


class ModelInconsistencyError(RuntimeError):
    """A model quantity contradicts its own precondition (e.g. an endemic
    root is predicted but the bracketing function has no sign change)."""


class ConfigError(ValueError):
    """A CLI configuration document is malformed."""


class PositivityWarning(UserWarning):
    """A simulated compartment undershot zero beyond the monitor threshold."""
