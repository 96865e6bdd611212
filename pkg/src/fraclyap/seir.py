"""Fractional SEIR model with a general incidence function.

State (S, E, I, R); the vector field uses the alpha-powered rates, the R
compartment is simulated but excluded from the Lyapunov functionals (it
feeds back into nothing).  Incidence functions carry analytic partial
derivatives and are screened numerically against the monotonicity
hypotheses.  Positivity of the discretization is monitored, never
enforced, so solver defects stay visible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import lyapunov
from .errors import ModelInconsistencyError, PositivityWarning
from .solvers import FdeProblem, solve
from .trajectory import FractionalOrder, KernelConfig, SampledTrajectory

POSITIVITY_FLOOR = -1e-8
_STATE_NAMES = ("S", "E", "I", "R")


@dataclass(frozen=True)
class SeirParams:
    """Base rates per unit time; the vector field uses rate**alpha."""

    Lambda: float
    d: float
    beta: float
    sigma: float
    gamma: float
    alpha: float = 1.0

    def __post_init__(self):
        for name in ("Lambda", "d", "beta", "sigma", "gamma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")

    @classmethod
    def from_powered(cls, Lambda_a, d_a, beta_a, sigma_a, gamma_a, alpha=1.0):
        """Parameters whose alpha-powered coefficients equal the given values.

        The vector field (hence every equilibrium) depends only on the
        powered coefficients, so this keeps the attractors fixed while the
        memory order alpha varies.
        """
        p = 1.0 / alpha
        return cls(Lambda_a**p, d_a**p, beta_a**p, sigma_a**p, gamma_a**p, alpha)

    @property
    def lam_a(self) -> float:
        return self.Lambda**self.alpha

    @property
    def d_a(self) -> float:
        return self.d**self.alpha

    @property
    def beta_a(self) -> float:
        return self.beta**self.alpha

    @property
    def sigma_a(self) -> float:
        return self.sigma**self.alpha

    @property
    def gamma_a(self) -> float:
        return self.gamma**self.alpha

    @property
    def m1(self) -> float:
        return self.sigma_a + self.d_a

    @property
    def m2(self) -> float:
        return self.gamma_a + self.d_a

    @property
    def s_free(self) -> float:
        """Susceptible level of the disease-free state."""
        return self.lam_a / self.d_a


@dataclass(frozen=True)
class IncidenceSpec:
    """Incidence F(S, I) with its factorization F = I * F1 and analytic
    partial derivatives (all callables accept NumPy arrays).

    ``dF_dI`` may be None; the threshold computation then falls back to a
    one-sided finite difference in I at I = 0 with step 1e-7.
    """

    name: str
    F: Callable
    F1: Callable
    dF_dI: Callable | None
    dF1_dS: Callable
    dF1_dI: Callable
    params: dict


def bilinear(b: float) -> IncidenceSpec:
    """Mass-action incidence b*S*I."""
    return IncidenceSpec(
        name="bilinear",
        F=lambda S, I: b * S * I,
        F1=lambda S, I: b * S + 0.0 * I,
        dF_dI=lambda S, I: b * S + 0.0 * I,
        dF1_dS=lambda S, I: b + 0.0 * S + 0.0 * I,
        dF1_dI=lambda S, I: 0.0 * S + 0.0 * I,
        params={"b": b},
    )


def beddington_deangelis(b: float, a1: float, a2: float, a3: float) -> IncidenceSpec:
    """Saturating incidence b*S*I / (1 + a1 S + a2 I + a3 S I)."""
    if min(a1, a2, a3) < 0:
        raise ValueError("a1, a2, a3 must be non-negative")

    def den(S, I):
        return 1.0 + a1 * S + a2 * I + a3 * S * I

    return IncidenceSpec(
        name="beddington_deangelis",
        F=lambda S, I: b * S * I / den(S, I),
        F1=lambda S, I: b * S / den(S, I),
        dF_dI=lambda S, I: b * S * (1.0 + a1 * S) / den(S, I) ** 2,
        dF1_dS=lambda S, I: b * (1.0 + a2 * I) / den(S, I) ** 2,
        dF1_dI=lambda S, I: -b * S * (a2 + a3 * S) / den(S, I) ** 2,
        params={"b": b, "a1": a1, "a2": a2, "a3": a3},
    )


@dataclass(frozen=True)
class HypothesesViolation:
    condition: str
    s: float
    i: float
    value: float


@dataclass(frozen=True)
class HypothesesReport:
    passed: bool
    first_violation: HypothesesViolation | None
    conditions: tuple[str, ...]


def check_hypotheses(inc: IncidenceSpec, s_max: float, i_max: float,
                     n: int = 101) -> HypothesesReport:
    """Screen the incidence monotonicity hypotheses on an n-by-n grid.

    Checks, in order: vanishing on both axes, the F = I*F1 factorization,
    dF1/dS > 0, dF1/dI <= 0 and dF/dI >= 0.  Reports the first violating
    grid point.
    """
    if not (s_max > 0 and i_max > 0):
        raise ValueError("the domain must have positive extent")
    if n < 10:
        raise ValueError("need at least a 10x10 grid")
    s = np.linspace(0.0, s_max, n)
    i = np.linspace(0.0, i_max, n)
    ss, ii = np.meshgrid(s, i, indexing="ij")

    f = np.asarray(inc.F(ss, ii), dtype=float)
    f1 = np.asarray(inc.F1(ss, ii), dtype=float)
    d1s = np.asarray(inc.dF1_dS(ss, ii), dtype=float)
    d1i = np.asarray(inc.dF1_dI(ss, ii), dtype=float)
    dfi = np.asarray(inc.dF_dI(ss, ii), dtype=float) if inc.dF_dI else None
    for arr in (f, f1, d1s, d1i) + ((dfi,) if dfi is not None else ()):
        if not np.all(np.isfinite(arr)):
            raise ValueError("incidence evaluation produced non-finite values")

    scale = max(1.0, float(np.max(np.abs(f))))
    tol = 1e-12 * scale
    checks = [
        ("F(S,0) = 0 and F(0,I) = 0",
         (np.abs(f) <= tol) | ((ss > 0) & (ii > 0)), f),
        ("F(S,I) = I * F1(S,I)", np.abs(f - ii * f1) <= tol, f - ii * f1),
        ("dF1/dS > 0", d1s > 0.0, d1s),
        ("dF1/dI <= 0", d1i <= tol, d1i),
    ]
    if dfi is not None:
        checks.append(("dF/dI >= 0", dfi >= -tol, dfi))
    names = tuple(name for name, _, _ in checks)

    for name, ok, vals in checks:
        if not np.all(ok):
            flat = np.argmax(~ok)
            idx = np.unravel_index(flat, ok.shape)
            return HypothesesReport(False, HypothesesViolation(
                name, float(ss[idx]), float(ii[idx]), float(vals[idx])), names)
    return HypothesesReport(True, None, names)


def _dF_dI_at(inc: IncidenceSpec, s: float, i: float) -> float:
    if inc.dF_dI is not None:
        return float(inc.dF_dI(np.asarray(s), np.asarray(i)))
    h = 1e-7  # one-sided difference: F may be undefined for I < 0
    return float((inc.F(np.asarray(s), np.asarray(i + h))
                  - inc.F(np.asarray(s), np.asarray(i))) / h)


def r0(params: SeirParams, inc: IncidenceSpec) -> float:
    """Basic reproduction number sigma^a dF/dI(S0, 0) / (m1 m2)."""
    val = params.sigma_a * _dF_dI_at(inc, params.s_free, 0.0) / (params.m1 * params.m2)
    if val < 0.0:
        raise ModelInconsistencyError(
            f"negative reproduction number {val}: malformed incidence")
    return val


def rhs_infected(params: SeirParams, inc: IncidenceSpec, state3) -> np.ndarray:
    """Right-hand side of the reduced (S, E, I) system."""
    s, e, i = state3
    f = float(inc.F(np.asarray(s), np.asarray(i)))
    return np.array([
        params.lam_a - params.d_a * s - f,
        f - params.m1 * e,
        params.sigma_a * e - params.m2 * i,
    ])


@dataclass(frozen=True)
class EquilibriumReport:
    """Steady states plus the max-norm residual of the reduced system at
    every reported equilibrium (endemic present only when r0 > 1)."""

    disease_free: tuple[float, float, float, float]
    r0: float
    endemic: tuple[float, float, float, float] | None
    residual_norm: float


def equilibria(params: SeirParams, inc: IncidenceSpec) -> EquilibriumReport:
    """Locate the steady states.

    The endemic state is found as a bracketed scalar root in E on
    (0, Lambda^a / m1); the upper endpoint keeps S* positive.  Uniqueness is
    not claimed; the report carries the residual of the root found.
    """
    s0 = params.s_free
    basic = r0(params, inc)
    p_f = (s0, 0.0, 0.0, 0.0)
    residual = float(np.max(np.abs(rhs_infected(params, inc, p_f[:3]))))

    endemic = None
    if basic > 1.0:
        e_hi = params.lam_a / params.m1

        def s_of(e):
            return (params.lam_a - params.m1 * e) / params.d_a

        def i_of(e):
            return params.sigma_a * e / params.m2

        def gap(e):
            return float(inc.F(np.asarray(s_of(e)), np.asarray(i_of(e)))) - params.m1 * e

        lo = None
        for frac in (1e-13, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1e-1):
            if gap(frac * e_hi) > 0.0:
                lo = frac * e_hi
                break
        if lo is None or not gap(e_hi) < 0.0:
            raise ModelInconsistencyError(
                "r0 > 1 but the endemic bracket has no sign change")
        e_star = brentq(gap, lo, e_hi, xtol=1e-15, rtol=8.9e-16)
        s_star, i_star = s_of(e_star), i_of(e_star)
        r_star = params.gamma_a * i_star / params.d_a
        endemic = (float(s_star), float(e_star), float(i_star), float(r_star))
        residual = max(residual, float(np.max(np.abs(
            rhs_infected(params, inc, endemic[:3])))))
    return EquilibriumReport(p_f, basic, endemic, residual)


def make_rhs(params: SeirParams, inc: IncidenceSpec):
    """Vector field of the full 4-state system."""

    def rhs(t, y):
        s, e, i, r = y
        f = float(inc.F(np.asarray(s), np.asarray(i)))
        return np.array([
            params.lam_a - params.d_a * s - f,
            f - params.m1 * e,
            params.sigma_a * e - params.m2 * i,
            params.gamma_a * i - params.d_a * r,
        ])

    return rhs


def simulate(params: SeirParams, inc: IncidenceSpec, y0,
             order: FractionalOrder, t_final: float, dt: float,
             kcfg: KernelConfig = KernelConfig()) -> SampledTrajectory:
    """Integrate the 4-state system with the solver of ``order.family``.

    Emits a ``PositivityWarning`` naming the first offending step when a
    compartment undershoots zero beyond the monitor threshold (positivity
    is not enforced by clipping).
    """
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (4,) or np.any(y0 < 0.0):
        raise ValueError("y0 must be four non-negative components (S, E, I, R)")
    problem = FdeProblem(rhs=make_rhs(params, inc), y0=y0, order=order,
                         t_span=(0.0, t_final), dt=dt, kernel=kcfg)
    traj = solve(problem)
    for j, name in enumerate(_STATE_NAMES):
        col = traj.values[:, j]
        worst = int(np.argmin(col))
        if col[worst] < POSITIVITY_FLOOR:
            warnings.warn(PositivityWarning(
                f"{name} reached {col[worst]:.3e} at step {worst}"))
    return traj


# ---------------------------------------------------------------------------
# Lyapunov functionals


def _v0_candidate(params: SeirParams, inc: IncidenceSpec) -> lyapunov.CandidateFunction:
    return lyapunov.psi_general(lambda x: inc.F1(x, 0.0 * x),
                                u_star=params.s_free, name="F1(.,0)")


def _v1_candidate(inc: IncidenceSpec, s_star: float, i_star: float):
    return lyapunov.psi_general(lambda x: inc.F(x, i_star + 0.0 * x),
                                u_star=s_star, name="F(.,I*)")


def _volterra_term(x, x_star):
    return x - x_star - x_star * np.log(x / x_star)


def lyapunov_V0(params: SeirParams, inc: IncidenceSpec, state3) -> float:
    """Disease-free functional: Psi-type integral in S plus E + (m1/sigma^a) I."""
    s, e, i = state3
    if not s > 0:
        raise ValueError("V0 needs S > 0")
    val = lyapunov.psi(_v0_candidate(params, inc), float(s))
    return val + float(e) + params.m1 / params.sigma_a * float(i)


def lyapunov_V1(params: SeirParams, inc: IncidenceSpec, endemic3, state3) -> float:
    """Endemic functional: Psi-type integral in S plus Volterra terms in E, I."""
    s_star, e_star, i_star = endemic3
    s, e, i = state3
    if not (s > 0 and e > 0 and i > 0):
        raise ValueError("V1 needs strictly positive (S, E, I)")
    val = lyapunov.psi(_v1_candidate(inc, s_star, i_star), float(s))
    val += _volterra_term(float(e), e_star)
    val += params.m1 / params.sigma_a * _volterra_term(float(i), i_star)
    return val


def v0_series(params: SeirParams, inc: IncidenceSpec,
              traj: SampledTrajectory) -> np.ndarray:
    """V0 along a simulated trajectory (vectorized)."""
    s, e, i = traj.values[:, 0], traj.values[:, 1], traj.values[:, 2]
    if np.any(s <= 0.0):
        raise ValueError("V0 needs strictly positive S along the trajectory")
    vals = lyapunov.psi_on_array(_v0_candidate(params, inc), s)
    return vals + e + params.m1 / params.sigma_a * i


def v1_series(params: SeirParams, inc: IncidenceSpec, endemic3,
              traj: SampledTrajectory) -> np.ndarray:
    """V1 along a simulated trajectory (vectorized)."""
    s_star, e_star, i_star = endemic3
    s, e, i = traj.values[:, 0], traj.values[:, 1], traj.values[:, 2]
    if np.any(s <= 0.0) or np.any(e <= 0.0) or np.any(i <= 0.0):
        raise ValueError("V1 needs strictly positive (S, E, I) along the trajectory")
    vals = lyapunov.psi_on_array(_v1_candidate(inc, s_star, i_star), s)
    return (vals + _volterra_term(e, e_star)
            + params.m1 / params.sigma_a * _volterra_term(i, i_star))


def g_entropy(x):
    """G(x) = x - 1 - ln x (non-negative, zero only at x = 1)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("g_entropy needs x > 0")
    out = x - 1.0 - np.log(x)
    return float(out) if out.ndim == 0 else out


def v1_bracket_direct(inc: IncidenceSpec, state3, endemic3):
    """The endemic dissipation bracket evaluated literally."""
    s, e, i = state3
    s_star, e_star, i_star = endemic3
    f_star = inc.F(s_star, i_star)
    f_si_star = inc.F(s, i_star + 0.0 * np.asarray(s))
    f_si = inc.F(s, i)
    return (3.0 - f_star / f_si_star + f_si / f_si_star
            - e_star * f_si / (e * f_star) - i / i_star
            - i_star * e / (i * e_star))


def v1_bracket_entropy(inc: IncidenceSpec, state3, endemic3):
    """The same bracket re-expressed through five G-terms."""
    s, e, i = state3
    s_star, e_star, i_star = endemic3
    f_star = inc.F(s_star, i_star)
    f_si_star = inc.F(s, i_star + 0.0 * np.asarray(s))
    f_si = inc.F(s, i)
    a = f_star / f_si_star
    b = f_si / f_si_star
    c = e_star * f_si / (e * f_star)
    d = i / i_star
    ee = i_star * e / (i * e_star)
    return -(g_entropy(d) - g_entropy(b) + g_entropy(a)
             + g_entropy(c) + g_entropy(ee))


def h_margin(inc: IncidenceSpec, s: float, i_star: float, i_grid) -> float:
    """Worst value of G(F(S,I)/F(S,I*)) - G(I/I*) over the I grid.

    Non-positive for every incidence satisfying the hypotheses (the
    two-case monotonicity argument around I = I*).
    """
    i_grid = np.asarray(i_grid, dtype=float)
    if np.any(i_grid <= 0.0):
        raise ValueError("the I grid must be strictly positive")
    ratio_f = inc.F(s + 0.0 * i_grid, i_grid) / inc.F(np.asarray(s), np.asarray(i_star))
    return float(np.max(g_entropy(ratio_f) - g_entropy(i_grid / i_star)))


# ---------------------------------------------------------------------------
# Stability verification


@dataclass(frozen=True)
class StabilityEntry:
    initial_state: tuple[float, float, float, float]
    converged: bool
    final_distance: float
    max_v_increase: float
    error: str | None


@dataclass(frozen=True)
class StabilityReport:
    r0: float
    attractor: str
    target: tuple[float, float, float, float]
    eps_conv: float
    entries: tuple[StabilityEntry, ...]

    @property
    def all_converged(self) -> bool:
        return all(e.converged and e.error is None for e in self.entries)


def perturbed_states(attractor, n: int, rng: np.random.Generator,
                     spread: float = 0.05,
                     floor: tuple[float, float] = (0.02, 0.08)) -> list[np.ndarray]:
    """Seeded corpus of admissible initial states around an attractor.

    Positive components get multiplicative U(1-spread, 1+spread) noise;
    zero components (the transversal directions of the disease-free state)
    are seeded at small absolute levels drawn from U(floor).  Fractional
    memory makes the approach to the attractor algebraic, ~t^(-alpha), so
    perturbation-scale starts are what a fixed-horizon convergence check
    can support.
    """
    a = np.asarray(attractor, dtype=float)
    out = []
    for _ in range(n):
        bumped = a * rng.uniform(1.0 - spread, 1.0 + spread, a.shape)
        seeded = rng.uniform(floor[0], floor[1], a.shape)
        out.append(np.where(a > 0.0, bumped, seeded))
    return out


def verify_stability(params: SeirParams, inc: IncidenceSpec,
                     order: FractionalOrder, initial_states: Sequence,
                     t_final: float, dt: float, eps_conv: float = 1e-3,
                     kcfg: KernelConfig = KernelConfig()) -> StabilityReport:
    """Simulate a corpus of initial states and check convergence to the
    attractor predicted by r0, plus monotone decay of the matching
    Lyapunov functional (worst forward difference reported per state).

    Per-state failures (including non-convergence by t_final) are recorded
    in the entries, not raised.
    """
    eq = equilibria(params, inc)
    if eq.r0 > 1.0:
        attractor, target = "endemic", np.asarray(eq.endemic)
    else:
        attractor, target = "disease_free", np.asarray(eq.disease_free)

    entries = []
    for y0 in initial_states:
        y0 = np.asarray(y0, dtype=float)
        try:
            if not y0[0] > 0.0 or np.any(y0[1:] < 0.0):
                raise ValueError("initial state must have S > 0 and E, I, R >= 0")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", PositivityWarning)
                traj = simulate(params, inc, y0, order, t_final, dt, kcfg)
            dist = float(np.max(np.abs(traj.values[-1] - target)))
            if eq.r0 > 1.0:
                v = v1_series(params, inc, eq.endemic[:3], traj)
            else:
                v = v0_series(params, inc, traj)
            max_dv = float(np.max(np.diff(v))) if len(v) > 1 else 0.0
            entries.append(StabilityEntry(tuple(y0), dist < eps_conv, dist,
                                          max_dv, None))
        except Exception as exc:  # noqa: BLE001 - per-state isolation
            entries.append(StabilityEntry(tuple(y0), False, float("nan"),
                                          float("nan"),
                                          f"{type(exc).__name__}: {exc}"))
    return StabilityReport(eq.r0, attractor, tuple(np.asarray(target)),
                           eps_conv, tuple(entries))
