"""Uniform-grid trajectories and fractional-order descriptors."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Family(enum.Enum):
    """Kernel family of a fractional operator."""

    RL_INTEGRAL = "rl_integral"
    CAPUTO = "caputo"
    CAPUTO_FABRIZIO = "cf"
    ABC = "abc"


DERIVATIVE_FAMILIES = (Family.CAPUTO, Family.CAPUTO_FABRIZIO, Family.ABC)


@dataclass(frozen=True)
class FractionalOrder:
    """Order alpha in (0, 1] plus the operator family.

    For CF and ABC the kernel rate alpha/(1 - alpha) blows up at alpha = 1;
    the operators and solvers switch to explicit classical branches there
    (first derivative / running integral), so alpha = 1 is a valid input.
    """

    alpha: float
    family: Family = Family.CAPUTO

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class KernelConfig:
    """Normalization and grid tolerance shared by the CF/ABC kernels.

    ``normalization_B`` is the value of the normalization function at the
    working order.  The convention B(0) = B(1) = 1 is satisfied by the
    default constant 1; other positive values are accepted for
    experimentation.  At alpha = 1 the classical branches ignore it.
    """

    normalization_B: float = 1.0
    grid_tolerance: float = 1e-8

    def __post_init__(self):
        if not self.normalization_B > 0:
            raise ValueError("normalization_B must be positive")
        if not self.grid_tolerance > 0:
            raise ValueError("grid_tolerance must be positive")


@dataclass(frozen=True)
class SampledTrajectory:
    """Samples on the uniform grid t0, t0 + dt, ..., t0 + (N-1) dt.

    ``values`` has shape (N,) for a scalar signal or (N, n_state) for a
    vector one; N >= 2 and every entry finite.
    """

    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if v.ndim not in (1, 2) or v.shape[0] < 2:
            raise ValueError("values must be 1-D or 2-D with at least 2 samples")
        if not np.all(np.isfinite(v)):
            raise ValueError("trajectory values must be finite")

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.shape[0])

    @property
    def t_final(self) -> float:
        return self.t0 + self.dt * (self.values.shape[0] - 1)

    def component(self, i: int) -> "SampledTrajectory":
        if self.values.ndim != 2:
            raise ValueError("component() requires a vector trajectory")
        return SampledTrajectory(self.t0, self.dt, self.values[:, i].copy())

    def with_values(self, values: np.ndarray) -> "SampledTrajectory":
        return SampledTrajectory(self.t0, self.dt, values)

    @classmethod
    def from_times(cls, t, values, tol: float = 1e-8) -> "SampledTrajectory":
        t = np.asarray(t, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("need at least two time samples")
        steps = np.diff(t)
        dt = float(steps.mean())
        if np.any(np.abs(steps - dt) > tol * max(1.0, abs(dt))):
            raise ValueError("time grid is not uniform")
        return cls(float(t[0]), dt, np.asarray(values, dtype=float))
