"""Initial-value solvers for D^alpha y = f(t, y) across the kernel families.

All schemes keep the full solution memory (no truncation): O(N^2) work per
state, which stays in seconds at desk scale and keeps discretization error
unambiguous.  Outputs are deterministic for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._kernels import abc_adams, caputo_adams
from .errors import DivergenceError
from .trajectory import Family, FractionalOrder, KernelConfig, SampledTrajectory

FP_TOL = 1e-12
FP_MAXIT = 50


@dataclass(frozen=True)
class FdeProblem:
    """An initial-value problem D^alpha y = rhs(t, y), y(t0) = y0.

    ``rhs`` maps (t, y) to an array of shape (n,); ``dt`` must divide the
    time span to within rounding.
    """

    rhs: Callable[[float, np.ndarray], np.ndarray]
    y0: np.ndarray
    order: FractionalOrder
    t_span: tuple[float, float]
    dt: float
    kernel: KernelConfig = field(default_factory=KernelConfig)

    def __post_init__(self):
        y0 = np.atleast_1d(np.asarray(self.y0, dtype=float))
        object.__setattr__(self, "y0", y0)
        t0, t1 = self.t_span
        if not t1 > t0:
            raise ValueError("t_span must satisfy T > t0")
        if not 0.0 < self.dt <= (t1 - t0) / 2.0:
            raise ValueError("dt must be positive and at most half the span")
        if y0.ndim != 1 or y0.size < 1 or not np.all(np.isfinite(y0)):
            raise ValueError("y0 must be a finite vector")

    @property
    def n_steps(self) -> int:
        span = self.t_span[1] - self.t_span[0]
        n = round(span / self.dt)
        if abs(n - span / self.dt) > 1e-8:
            raise ValueError("dt must evenly divide the time span")
        return int(n)


def _wrap_rhs(problem: FdeProblem):
    rhs = problem.rhs
    n = problem.y0.shape[0]

    def wrapped(t, y):
        out = np.asarray(rhs(t, y), dtype=float).reshape(-1)
        if out.shape[0] != n:
            raise ValueError(f"rhs returned shape {out.shape}, expected ({n},)")
        return out

    return wrapped


def solve_caputo(problem: FdeProblem) -> SampledTrajectory:
    """Fractional Adams-Bashforth-Moulton (PECE) for the Caputo family."""
    if problem.order.family != Family.CAPUTO:
        raise ValueError("solve_caputo requires a Caputo-family order")
    values = caputo_adams(_wrap_rhs(problem), problem.t_span[0], problem.dt,
                          problem.order.alpha, problem.y0, problem.n_steps)
    return _as_trajectory(problem, values)


def solve_cf(problem: FdeProblem) -> SampledTrajectory:
    """Two-step Adams-Bashforth on the CF fixed-point form.

    The converted equation y = y0 + a1 (f - f0) + a2 int f is stepped in
    difference form; a1 = 2(1-a)/(B(2-a)), a2 = 2a/(B(2-a)).  At alpha = 1
    this is the classical AB2 scheme (a1, a2) = (0, 1).
    """
    if problem.order.family != Family.CAPUTO_FABRIZIO:
        raise ValueError("solve_cf requires a CF-family order")
    alpha = problem.order.alpha
    if alpha == 1.0:
        a1, a2 = 0.0, 1.0
    else:
        denom = problem.kernel.normalization_B * (2.0 - alpha)
        a1 = 2.0 * (1.0 - alpha) / denom
        a2 = 2.0 * alpha / denom
    rhs = _wrap_rhs(problem)
    t0, dt, n_steps = problem.t_span[0], problem.dt, problem.n_steps

    y = np.empty((n_steps + 1, problem.y0.shape[0]))
    y[0] = problem.y0
    f_prev = rhs(t0, y[0])
    f_cur = f_prev
    for k in range(1, n_steps + 1):
        y[k] = y[k - 1] + a1 * (f_cur - f_prev) + a2 * dt * (3.0 * f_cur - f_prev) / 2.0
        t_k = t0 + k * dt
        if not np.all(np.isfinite(y[k])):
            raise DivergenceError(k, t_k)
        f_prev = f_cur
        f_cur = rhs(t_k, y[k])
        if not np.all(np.isfinite(f_cur)):
            raise DivergenceError(k, t_k)
    return _as_trajectory(problem, y)


def solve_abc(problem: FdeProblem) -> SampledTrajectory:
    """Implicit fractional Adams on the ABC fixed-point form.

    y = y0 + (1-a)/B (f - f0) + a/B I^a f with product-trapezoid memory
    weights; the corrector is solved by fixed-point iteration.
    """
    if problem.order.family != Family.ABC:
        raise ValueError("solve_abc requires an ABC-family order")
    alpha = problem.order.alpha
    b_norm = 1.0 if alpha == 1.0 else problem.kernel.normalization_B
    values = abc_adams(_wrap_rhs(problem), problem.t_span[0], problem.dt,
                       alpha, b_norm, problem.y0, problem.n_steps,
                       FP_TOL, FP_MAXIT)
    return _as_trajectory(problem, values)


def rk4_oracle(problem: FdeProblem) -> SampledTrajectory:
    """Classical fourth-order Runge-Kutta; test oracle for alpha = 1 runs."""
    if problem.order.alpha != 1.0:
        raise ValueError("rk4_oracle requires alpha = 1")
    rhs = _wrap_rhs(problem)
    t0, dt, n_steps = problem.t_span[0], problem.dt, problem.n_steps
    y = np.empty((n_steps + 1, problem.y0.shape[0]))
    y[0] = problem.y0
    for k in range(n_steps):
        t = t0 + k * dt
        k1 = rhs(t, y[k])
        k2 = rhs(t + dt / 2.0, y[k] + dt / 2.0 * k1)
        k3 = rhs(t + dt / 2.0, y[k] + dt / 2.0 * k2)
        k4 = rhs(t + dt, y[k] + dt * k3)
        y[k + 1] = y[k] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y[k + 1])):
            raise DivergenceError(k + 1, t + dt)
    return _as_trajectory(problem, y)


def solve(problem: FdeProblem) -> SampledTrajectory:
    """Dispatch on the problem's derivative family."""
    family = problem.order.family
    if family == Family.CAPUTO:
        return solve_caputo(problem)
    if family == Family.CAPUTO_FABRIZIO:
        return solve_cf(problem)
    if family == Family.ABC:
        return solve_abc(problem)
    raise ValueError(f"{family} does not define an initial-value problem")


def _as_trajectory(problem: FdeProblem, values: np.ndarray) -> SampledTrajectory:
    if values.shape[1] == 1:
        values = values[:, 0]
    return SampledTrajectory(problem.t_span[0], problem.dt, values)
