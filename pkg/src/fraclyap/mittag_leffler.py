"""Two- and three-parameter Mittag-Leffler functions via stabilized series.

The series is summed with Kahan compensation and a term-ratio stopping
rule; per-term magnitudes come from ``lgamma`` so large indices neither
overflow nor accumulate error.  This is accurate for the arguments the
package needs (z <= 0 kernel arguments of moderate size, plus small
positive z for the classical identities); large-|z| asymptotics and
complex arguments are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import ml_series_vec
from .errors import EvaluationError

DEFAULT_TOL = 1e-13
TERM_BUDGET = 10_000

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class MLParams:
    """Parameters (alpha, beta) plus the Prabhakar exponent rho (default 1).

    rho = 1 is the ordinary two-parameter function; rho = 2 appears in the
    derivative identity d/dz E_{a,b} = E^2_{a,a+b}.
    """

    alpha: float
    beta: float
    rho: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.rho > 0):
            raise ValueError("alpha, beta and rho must all be positive")


def _sum_series(z: float, log_coeff, tol: float, budget: int) -> float:
    """Kahan-compensated sum of sgn(z)^j exp(log_coeff(j) + j log|z|)."""
    if z == 0.0:
        return math.exp(log_coeff(0))
    logz = math.log(abs(z))
    sgn = -1.0 if z < 0.0 else 1.0
    total = math.exp(log_coeff(0))
    comp = 0.0
    prev_mag = math.inf
    sign_j = 1.0
    for j in range(1, budget + 1):
        mag = math.exp(log_coeff(j) + j * logz)
        if not math.isfinite(mag):
            raise EvaluationError(f"series term overflow at j={j} (z={z})")
        sign_j *= sgn
        term = sign_j * mag
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if mag <= tol + 4.0 * _EPS * abs(total) and mag <= prev_mag:
            return total
        prev_mag = mag
    raise EvaluationError(
        f"series did not converge within {budget} terms (z={z})")


def _ml2(alpha: float, beta: float, z: float, tol: float = DEFAULT_TOL) -> float:
    """Dedicated two-parameter path: sum z^j / Gamma(alpha j + beta)."""
    return _sum_series(z, lambda j: -math.lgamma(alpha * j + beta), tol, TERM_BUDGET)


def _prabhakar(alpha: float, beta: float, rho: float, z: float,
               tol: float = DEFAULT_TOL) -> float:
    """General path: sum (rho)_j z^j / (j! Gamma(alpha j + beta))."""
    lg_rho = math.lgamma(rho)

    def log_coeff(j):
        return (math.lgamma(rho + j) - lg_rho - math.lgamma(j + 1.0)
                - math.lgamma(alpha * j + beta))

    return _sum_series(z, log_coeff, tol, TERM_BUDGET)


def ml(params: MLParams, z: float, tol: float = DEFAULT_TOL) -> float:
    """Evaluate E^rho_{alpha,beta}(z) to absolute tolerance ``tol``.

    Raises ``EvaluationError`` when the series does not converge within the
    term budget (it is never silently truncated).
    """
    if not math.isfinite(z):
        raise ValueError("z must be finite")
    if params.rho == 1.0:
        return _ml2(params.alpha, params.beta, z, tol)
    return _prabhakar(params.alpha, params.beta, params.rho, z, tol)


def ml_derivative(params: MLParams, z: float, tol: float = DEFAULT_TOL) -> float:
    """d/dz of the two-parameter function: E^2_{alpha, alpha+beta}(z)."""
    if params.rho != 1.0:
        raise ValueError("derivative identity applies to the rho = 1 function")
    return ml(MLParams(params.alpha, params.alpha + params.beta, 2.0), z, tol)


def ml_array(alpha: float, beta: float, z, rho: float = 1.0,
             tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorized evaluation (backend hot path, used for operator kernels)."""
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError("z must be finite")
    return ml_series_vec(float(alpha), float(beta), float(rho), z, tol, TERM_BUDGET)
