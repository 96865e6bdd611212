"""Fractional operators on uniformly sampled trajectories.

Each operator integrates its kernel exactly against the piecewise-linear
interpolant of the samples (L1 / product-trapezoid style), which turns
every evaluation grid into one stationary causal convolution of the node
differences:

    out[n] = sum_{m=1..n} w[m] * (u[n-m+1] - u[n-m])

plus, for the integrals, boundary/pointwise terms.  Derivative operators
report 0 at t0 (empty defining integral); the CF/AB integrals keep their
pointwise term there.  At alpha = 1 the CF/ABC kernel rate is singular and
the operators switch to explicit classical branches.
"""

from __future__ import annotations

import math

import numpy as np

from ._kernels import causal_conv
from .mittag_leffler import ml_array
from .trajectory import Family, FractionalOrder, KernelConfig, SampledTrajectory

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)


def _require_alpha(alpha: float, allow_one: bool = True):
    hi_ok = alpha <= 1.0 if allow_one else alpha < 1.0
    if not (0.0 < alpha and hi_ok):
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise ValueError(f"alpha must lie in {bound}, got {alpha}")


def _require_scalar(u: SampledTrajectory):
    if u.values.ndim != 1:
        raise ValueError("operator inputs must be scalar trajectories")


def _classical_derivative(u: SampledTrajectory) -> SampledTrajectory:
    # Three-point stencils (second order); endpoint convention 0 at t0.
    out = np.gradient(u.values, u.dt, edge_order=2)
    out[0] = 0.0
    return u.with_values(out)


def _running_integral(values: np.ndarray, dt: float) -> np.ndarray:
    out = np.zeros_like(values)
    out[1:] = np.cumsum(0.5 * (values[1:] + values[:-1])) * dt
    return out


def rl_integral(u: SampledTrajectory, alpha: float) -> SampledTrajectory:
    """Riemann-Liouville integral of order alpha, exact for piecewise-linear u."""
    _require_alpha(alpha)
    _require_scalar(u)
    n = len(u)
    m = np.arange(n, dtype=float)
    w = np.zeros(n)
    w[1:] = (u.dt**alpha / math.gamma(alpha + 2.0)) * (
        m[1:] ** (alpha + 1.0) - (m[1:] - 1.0) ** (alpha + 1.0))
    out = causal_conv(w, np.diff(u.values))
    out += u.values[0] * (u.dt * m) ** alpha / math.gamma(alpha + 1.0)
    return u.with_values(out)


def caputo_deriv(u: SampledTrajectory, alpha: float) -> SampledTrajectory:
    """Caputo derivative via the L1 scheme (classical branch at alpha = 1)."""
    _require_alpha(alpha)
    _require_scalar(u)
    if len(u) < 3:
        raise ValueError("Caputo derivative needs at least 3 samples")
    if alpha == 1.0:
        return _classical_derivative(u)
    n = len(u)
    m = np.arange(n, dtype=float)
    w = np.zeros(n)
    w[1:] = (u.dt**-alpha / math.gamma(2.0 - alpha)) * (
        m[1:] ** (1.0 - alpha) - (m[1:] - 1.0) ** (1.0 - alpha))
    return u.with_values(causal_conv(w, np.diff(u.values)))


def cf_deriv(u: SampledTrajectory, alpha: float,
             cfg: KernelConfig = KernelConfig()) -> SampledTrajectory:
    """Caputo-Fabrizio derivative (exponential kernel, integrated exactly)."""
    _require_alpha(alpha)
    _require_scalar(u)
    if alpha == 1.0:
        return _classical_derivative(u)
    lam = alpha / (1.0 - alpha)
    x = lam * u.dt
    pref = cfg.normalization_B * (2.0 - alpha) / (2.0 * (1.0 - alpha))
    cell = -math.expm1(-x) / x  # (1 - e^-x)/x, stable for small x
    n = len(u)
    m = np.arange(n, dtype=float)
    w = pref * cell * np.exp(-x * (m - 1.0))
    return u.with_values(causal_conv(w, np.diff(u.values)))


def cf_integral(f: SampledTrajectory, alpha: float,
                cfg: KernelConfig = KernelConfig()) -> SampledTrajectory:
    """CF integral: affine combination of f and its running integral.

    At alpha = 1 this is the classical running integral (dedicated branch;
    the kernel formula's coefficient 2/B does not reduce to it on its own).
    """
    _require_alpha(alpha)
    _require_scalar(f)
    if alpha == 1.0:
        return f.with_values(_running_integral(f.values, f.dt))
    denom = cfg.normalization_B * (2.0 - alpha)
    c_point = 2.0 * (1.0 - alpha) / denom
    c_int = 2.0 * alpha / denom
    out = c_point * f.values + c_int * _running_integral(f.values, f.dt)
    return f.with_values(out)


def _abc_weights(n: int, dt: float, alpha: float, b_norm: float) -> np.ndarray:
    """Cell moments of the Mittag-Leffler kernel by 4-point Gauss-Legendre."""
    lam = alpha / (1.0 - alpha)
    m = np.arange(1, n, dtype=float)
    # quadrature nodes in every cell [(m-1) dt, m dt]
    s = (m[:, None] - 1.0) * dt + dt * 0.5 * (_GL_NODES[None, :] + 1.0)
    kern = ml_array(alpha, 1.0, -lam * s**alpha)
    moments = dt * 0.5 * kern @ _GL_WEIGHTS
    w = np.zeros(n)
    w[1:] = b_norm / (1.0 - alpha) * moments / dt
    return w


def abc_deriv(u: SampledTrajectory, alpha: float,
              cfg: KernelConfig = KernelConfig()) -> SampledTrajectory:
    """Atangana-Baleanu-Caputo derivative (Mittag-Leffler kernel)."""
    _require_alpha(alpha)
    _require_scalar(u)
    if alpha == 1.0:
        return _classical_derivative(u)
    w = _abc_weights(len(u), u.dt, alpha, cfg.normalization_B)
    return u.with_values(causal_conv(w, np.diff(u.values)))


def ab_integral(f: SampledTrajectory, alpha: float,
                cfg: KernelConfig = KernelConfig()) -> SampledTrajectory:
    """AB integral: (1-a)/B f + a/B RL I^a f (classical integral at a = 1, B = 1)."""
    _require_alpha(alpha)
    _require_scalar(f)
    b = cfg.normalization_B
    out = ((1.0 - alpha) / b) * f.values + (alpha / b) * rl_integral(f, alpha).values
    return f.with_values(out)


def fractional_deriv(u: SampledTrajectory, order: FractionalOrder,
                     cfg: KernelConfig = KernelConfig()) -> SampledTrajectory:
    """Dispatch to the derivative operator of ``order.family``."""
    if order.family == Family.CAPUTO:
        return caputo_deriv(u, order.alpha)
    if order.family == Family.CAPUTO_FABRIZIO:
        return cf_deriv(u, order.alpha, cfg)
    if order.family == Family.ABC:
        return abc_deriv(u, order.alpha, cfg)
    raise ValueError(f"{order.family} is not a derivative family")
