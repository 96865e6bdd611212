"""fraclyap: fractional-order operators, FDE solvers, Lyapunov-estimate
verification, and a fractional SEIR model with general incidence."""

from ._kernels import BACKEND
from .errors import (ConfigError, CorrectorError, DivergenceError,
                     EvaluationError, ModelInconsistencyError,
                     PositivityWarning)
from .mittag_leffler import MLParams, ml, ml_array, ml_derivative
from .operators import (ab_integral, abc_deriv, caputo_deriv, cf_deriv,
                        cf_integral, fractional_deriv, rl_integral)
from .solvers import (FdeProblem, rk4_oracle, solve, solve_abc, solve_caputo,
                      solve_cf)
from .trajectory import (Family, FractionalOrder, KernelConfig,
                         SampledTrajectory)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    "Family", "FractionalOrder", "KernelConfig", "SampledTrajectory",
    "MLParams", "ml", "ml_array", "ml_derivative",
    "rl_integral", "caputo_deriv", "cf_deriv", "cf_integral", "abc_deriv",
    "ab_integral", "fractional_deriv",
    "FdeProblem", "solve", "solve_caputo", "solve_cf", "solve_abc",
    "rk4_oracle",
    "EvaluationError", "DivergenceError", "CorrectorError",
    "ModelInconsistencyError", "ConfigError", "PositivityWarning",
]
