"""Lyapunov building-block functions and fractional-derivative estimate checks.

The candidate functions are the quadratic u^2, the Volterra form
u - u* - u* ln(u/u*), and the general convex form

    Psi(u) = int_{u*}^{u} (g(s) - g(u*)) / g(s) ds

for a positive, strictly increasing g.  ``verify_estimate`` samples
Psi(u(t)) pointwise on the trajectory grid, applies the requested
fractional derivative to the composition, and compares it against
Psi'(u(t)) times the fractional derivative of u(t).  The continuum
inequality is exact; the discrete check carries a tolerance proportional
to dt that must not grow under grid refinement.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import quad

from .operators import fractional_deriv
from .trajectory import (DERIVATIVE_FAMILIES, FractionalOrder, KernelConfig,
                         SampledTrajectory)

DEFAULT_TOLERANCE_FACTOR = 10.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)


class CandidateKind(enum.Enum):
    QUADRATIC = "quadratic"
    VOLTERRA = "volterra"
    PSI_GENERAL = "psi_general"


class Verdict(enum.Enum):
    HOLDS = "HOLDS"
    HOLDS_WITHIN_TOLERANCE = "HOLDS_WITHIN_TOLERANCE"
    VIOLATED = "VIOLATED"


@dataclass(frozen=True)
class CandidateFunction:
    """A Lyapunov candidate: kind plus anchor u* and, for the general form,
    the shape function g (positive and strictly increasing on the sampled
    range; checked numerically, not symbolically)."""

    kind: CandidateKind
    u_star: float | None = None
    g: Callable[[np.ndarray], np.ndarray] | None = None
    g_name: str = ""

    def __post_init__(self):
        if self.kind in (CandidateKind.VOLTERRA, CandidateKind.PSI_GENERAL):
            if self.u_star is None or not self.u_star > 0:
                raise ValueError(f"{self.kind.value} needs u_star > 0")
        if self.kind == CandidateKind.PSI_GENERAL and self.g is None:
            raise ValueError("psi_general needs the shape function g")

    def label(self) -> str:
        if self.kind == CandidateKind.PSI_GENERAL and self.g_name:
            return f"psi_general[{self.g_name}]"
        return self.kind.value


def quadratic() -> CandidateFunction:
    return CandidateFunction(CandidateKind.QUADRATIC)


def volterra(u_star: float) -> CandidateFunction:
    return CandidateFunction(CandidateKind.VOLTERRA, u_star=u_star)


def psi_general(g, u_star: float, name: str = "") -> CandidateFunction:
    return CandidateFunction(CandidateKind.PSI_GENERAL, u_star=u_star, g=g,
                             g_name=name)


def _require_positive(u, what: str):
    if np.any(np.asarray(u) <= 0.0):
        raise ValueError(f"{what} must be strictly positive")


def _check_g(c: CandidateFunction, lo: float, hi: float, samples: int = 1000):
    """Positivity and strict monotonicity of g on [lo, hi], numerically."""
    pts = np.linspace(lo, hi, samples)
    vals = np.asarray(c.g(pts), dtype=float)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
        raise ValueError("g must be positive on the sampled range")
    if samples > 1 and not np.all(np.diff(vals) > 0.0):
        raise ValueError("g must be strictly increasing on the sampled range")


def psi(c: CandidateFunction, u: float) -> float:
    """Value of the candidate function at u."""
    if c.kind == CandidateKind.QUADRATIC:
        return float(u) ** 2
    _require_positive(u, "u")
    if c.kind == CandidateKind.VOLTERRA:
        return u - c.u_star - c.u_star * np.log(u / c.u_star)
    lo, hi = min(u, c.u_star), max(u, c.u_star)
    _check_g(c, lo, hi, samples=33)
    g_star = float(c.g(np.asarray(c.u_star)))
    val, _ = quad(lambda s: 1.0 - g_star / float(c.g(np.asarray(s))),
                  c.u_star, u, epsabs=1e-10, epsrel=1e-10, limit=200)
    return val


def psi_slope(c: CandidateFunction, u: float) -> float:
    """dPsi/du at u: 2u, 1 - u*/u, or 1 - g(u*)/g(u)."""
    if c.kind == CandidateKind.QUADRATIC:
        return 2.0 * u
    _require_positive(u, "u")
    if c.kind == CandidateKind.VOLTERRA:
        return 1.0 - c.u_star / u
    return 1.0 - float(c.g(np.asarray(c.u_star))) / float(c.g(np.asarray(u)))


def _segment_quadrature(g, g_star: float, breaks: np.ndarray) -> np.ndarray:
    """Cumulative int of (1 - g_star/g) from breaks[0] to every break point.

    Composite 4-point Gauss-Legendre per segment; long segments are split
    so no panel exceeds 1/256 of the total span.
    """
    spans = np.diff(breaks)
    total = breaks[-1] - breaks[0]
    cap = max(total / 256.0, 1e-30)
    pieces = np.maximum(1, np.ceil(spans / cap).astype(int))

    seg_vals = np.empty(spans.size)
    for npiece in np.unique(pieces):
        idx = np.where(pieces == npiece)[0]
        a = breaks[idx]
        h = spans[idx] / npiece
        offs = np.arange(npiece)
        # panel starts: (len(idx), npiece); GL nodes: (..., 4)
        starts = a[:, None] + offs[None, :] * h[:, None]
        pts = starts[..., None] + h[:, None, None] * 0.5 * (_GL_NODES + 1.0)
        integ = 1.0 - g_star / np.asarray(g(pts), dtype=float)
        seg_vals[idx] = (h * 0.5) * (integ @ _GL_WEIGHTS).sum(axis=1)
    return np.concatenate(([0.0], np.cumsum(seg_vals)))


def psi_on_array(c: CandidateFunction, u: np.ndarray) -> np.ndarray:
    """Pointwise Psi over an array (fast path used on trajectories)."""
    u = np.asarray(u, dtype=float)
    if c.kind == CandidateKind.QUADRATIC:
        return u**2
    _require_positive(u, "u")
    if c.kind == CandidateKind.VOLTERRA:
        return u - c.u_star - c.u_star * np.log(u / c.u_star)
    breaks = np.unique(np.concatenate((u.ravel(), [c.u_star])))
    if breaks.size == 1:
        return np.zeros_like(u)
    g_star = float(c.g(np.asarray(c.u_star)))
    cum = _segment_quadrature(c.g, g_star, breaks)
    cum -= cum[np.searchsorted(breaks, c.u_star)]
    return cum[np.searchsorted(breaks, u)]


def psi_slope_on_array(c: CandidateFunction, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if c.kind == CandidateKind.QUADRATIC:
        return 2.0 * u
    _require_positive(u, "u")
    if c.kind == CandidateKind.VOLTERRA:
        return 1.0 - c.u_star / u
    return 1.0 - float(c.g(np.asarray(c.u_star))) / np.asarray(c.g(u), dtype=float)


@dataclass(frozen=True)
class EstimateReport:
    """Pointwise sides of one fractional Lyapunov estimate.

    ``max_violation`` is the largest lhs - rhs over the grid; the verdict is
    HOLDS when it is non-positive, HOLDS_WITHIN_TOLERANCE when it stays
    below ``tolerance_used`` (= factor * dt), VIOLATED otherwise.
    """

    lhs: SampledTrajectory
    rhs: SampledTrajectory
    max_violation: float
    tolerance_used: float
    verdict: Verdict


def _classify(max_violation: float, tolerance: float) -> Verdict:
    if max_violation <= 0.0:
        return Verdict.HOLDS
    if max_violation <= tolerance:
        return Verdict.HOLDS_WITHIN_TOLERANCE
    return Verdict.VIOLATED


def verify_estimate(u: SampledTrajectory, order: FractionalOrder,
                    c: CandidateFunction,
                    kcfg: KernelConfig = KernelConfig(),
                    tolerance_factor: float = DEFAULT_TOLERANCE_FACTOR,
                    ) -> EstimateReport:
    """Check D^alpha Psi(u(t)) <= Psi'(u(t)) D^alpha u(t) along ``u``."""
    if order.family not in DERIVATIVE_FAMILIES:
        raise ValueError("estimate verification needs a derivative family")
    if u.values.ndim != 1:
        raise ValueError("verify_estimate expects a scalar trajectory")
    if c.kind != CandidateKind.QUADRATIC:
        _require_positive(u.values, "the trajectory")
    if c.kind == CandidateKind.PSI_GENERAL:
        lo = min(float(u.values.min()), c.u_star)
        hi = max(float(u.values.max()), c.u_star)
        _check_g(c, lo, hi)

    composed = u.with_values(psi_on_array(c, u.values))
    lhs = fractional_deriv(composed, order, kcfg)
    du = fractional_deriv(u, order, kcfg)
    rhs = u.with_values(psi_slope_on_array(c, u.values) * du.values)

    max_violation = float(np.max(lhs.values - rhs.values))
    tolerance = tolerance_factor * u.dt
    return EstimateReport(lhs=lhs, rhs=rhs, max_violation=max_violation,
                          tolerance_used=tolerance,
                          verdict=_classify(max_violation, tolerance))


@dataclass(frozen=True)
class ScanEntry:
    index: int
    report: EstimateReport | None
    error: str | None


def margin_scan(problem_family: Iterable[tuple[SampledTrajectory,
                                               FractionalOrder,
                                               CandidateFunction]],
                kcfg: KernelConfig = KernelConfig(),
                tolerance_factor: float = DEFAULT_TOLERANCE_FACTOR,
                ) -> list[ScanEntry]:
    """Run ``verify_estimate`` over a batch; per-item failures are recorded
    in the entry instead of aborting the scan."""
    entries = []
    for i, (u, order, cand) in enumerate(problem_family):
        try:
            report = verify_estimate(u, order, cand, kcfg, tolerance_factor)
            entries.append(ScanEntry(i, report, None))
        except Exception as exc:  # noqa: BLE001 - isolation contract
            entries.append(ScanEntry(i, None, f"{type(exc).__name__}: {exc}"))
    return entries


def worst_verdict(entries: Sequence[ScanEntry]) -> Verdict | None:
    """Most severe verdict among the successful entries (None if none ran)."""
    order = [Verdict.HOLDS, Verdict.HOLDS_WITHIN_TOLERANCE, Verdict.VIOLATED]
    worst = None
    for e in entries:
        if e.report is None:
            continue
        if worst is None or order.index(e.report.verdict) > order.index(worst):
            worst = e.report.verdict
    return worst
