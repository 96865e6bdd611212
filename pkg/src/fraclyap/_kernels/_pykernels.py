"""Pure-NumPy implementations of the hot kernels.

The compiled extension (``_ckernels``) exposes the same four functions; both
backends must stay drop-in interchangeable.  Everything here is O(N^2)
full-memory convolution work on uniform grids.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import CorrectorError, DivergenceError, EvaluationError

_EPS = np.finfo(float).eps


def causal_conv(w, x):
    """Lower-triangular stationary convolution.

    Returns ``y`` with ``y[n] = sum_{m=1..n} w[m] * x[n-m]`` for
    ``n = 0 .. len(w)-1`` (``w[0]`` is ignored, ``y[0] = 0``).  ``x`` must
    hold at least ``len(w) - 1`` entries; trailing entries are unused.
    """
    w = np.ascontiguousarray(w, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = w.shape[0]
    out = np.zeros(n)
    if n > 1:
        out[1:] = np.convolve(w[1:], x[: n - 1])[: n - 1]
    return out


def ml_series_vec(alpha, beta, rho, z, tol, max_terms):
    """Elementwise three-parameter Mittag-Leffler series.

    Terms are formed from ``lgamma`` magnitudes (no overflow, no error
    accumulation across terms) and accumulated with Kahan compensation.
    An element is converged once its term is small against the running sum
    and decreasing.  Raises ``EvaluationError`` instead of truncating.
    """
    z = np.ascontiguousarray(z, dtype=np.float64)
    flat = z.ravel()
    with np.errstate(divide="ignore"):
        logz = np.where(flat != 0.0, np.log(np.abs(flat)), -np.inf)
    sgn = np.where(flat < 0.0, -1.0, 1.0)

    total = np.full(flat.shape, 1.0 / math.gamma(beta))
    comp = np.zeros_like(total)
    prev_mag = np.full(flat.shape, np.inf)
    active = flat != 0.0
    sign_j = np.ones_like(flat)

    lg_rho = math.lgamma(rho)
    for j in range(1, max_terms + 1):
        if not active.any():
            return total.reshape(z.shape)
        c_j = (math.lgamma(rho + j) - lg_rho - math.lgamma(j + 1.0)
               - math.lgamma(alpha * j + beta))
        sign_j = sign_j * sgn
        mag = np.exp(c_j + j * logz)
        if not np.all(np.isfinite(mag[active])):
            raise EvaluationError(
                f"Mittag-Leffler term overflow at j={j} "
                f"(alpha={alpha}, beta={beta}, rho={rho})")
        term = np.where(active, sign_j * mag, 0.0)

        y = term - comp
        t = total + y
        comp = np.where(active, (t - total) - y, comp)
        total = np.where(active, t, total)

        done = (mag <= tol + 4.0 * _EPS * np.abs(total)) & (mag <= prev_mag)
        active &= ~done
        prev_mag = mag

    raise EvaluationError(
        f"Mittag-Leffler series did not converge within {max_terms} terms "
        f"(alpha={alpha}, beta={beta}, rho={rho}, {int(active.sum())} points left)")


def _check_state(y, step, t):
    if not np.all(np.isfinite(y)):
        raise DivergenceError(step, t)
    return y


def _adams_weights(alpha, n_steps):
    """Rectangle (b), trapezoid interior (g) and trapezoid initial (a0)
    weights of the fractional Adams scheme on a uniform grid."""
    m = np.arange(n_steps + 1, dtype=np.float64)
    b = np.zeros(n_steps + 1)
    b[1:] = m[1:] ** alpha - (m[1:] - 1.0) ** alpha
    g = np.empty(n_steps + 1)
    g[0] = 1.0
    g[1:] = ((m[1:] + 1.0) ** (alpha + 1.0) + (m[1:] - 1.0) ** (alpha + 1.0)
             - 2.0 * m[1:] ** (alpha + 1.0))
    k_idx = np.arange(1, n_steps + 1, dtype=np.float64)
    a0 = (k_idx - 1.0) ** (alpha + 1.0) - (k_idx - 1.0 - alpha) * k_idx**alpha
    return b, g, a0


def caputo_adams(rhs, t0, dt, alpha, y0, n_steps):
    """Predictor-corrector stepping for a Caputo-type initial value problem.

    Fractional rectangle-rule predictor, fractional trapezoid corrector,
    full-memory convolution over the f-history (PECE).  Returns the state
    array of shape ``(n_steps + 1, n)``.
    """
    y0 = np.ascontiguousarray(y0, dtype=np.float64)
    n = y0.shape[0]
    b, g, a0 = _adams_weights(alpha, n_steps)

    c_pred = dt**alpha / math.gamma(alpha + 1.0)
    c_corr = dt**alpha / math.gamma(alpha + 2.0)

    y = np.empty((n_steps + 1, n))
    f = np.empty((n_steps + 1, n))
    y[0] = y0
    f[0] = _check_state(np.asarray(rhs(t0, y0), dtype=np.float64), 0, t0)

    for k in range(1, n_steps + 1):
        t_k = t0 + k * dt
        mem_p = f[:k].T @ b[k:0:-1]
        y_pred = _check_state(y0 + c_pred * mem_p, k, t_k)
        f_pred = _check_state(np.asarray(rhs(t_k, y_pred), dtype=np.float64), k, t_k)
        mem_c = a0[k - 1] * f[0]
        if k > 1:
            mem_c = mem_c + f[1:k].T @ g[k - 1:0:-1]
        y[k] = _check_state(y0 + c_corr * (mem_c + f_pred), k, t_k)
        f[k] = _check_state(np.asarray(rhs(t_k, y[k]), dtype=np.float64), k, t_k)
    return y


def abc_adams(rhs, t0, dt, alpha, b_norm, y0, n_steps, fp_tol, fp_maxit):
    """Implicit fractional-Adams stepping for an ABC-type problem.

    Solves ``y = y0 + (1-a)/B (f - f0) + a/B I^a f`` with product-trapezoid
    weights for the memory integral and a fixed-point corrector started
    from a rectangle-rule predictor.
    """
    y0 = np.ascontiguousarray(y0, dtype=np.float64)
    n = y0.shape[0]
    b, g, a0 = _adams_weights(alpha, n_steps)

    c_lin = (1.0 - alpha) / b_norm
    c_pred = (alpha / b_norm) * dt**alpha / math.gamma(alpha + 1.0)
    c_corr = (alpha / b_norm) * dt**alpha / math.gamma(alpha + 2.0)

    y = np.empty((n_steps + 1, n))
    f = np.empty((n_steps + 1, n))
    y[0] = y0
    f[0] = _check_state(np.asarray(rhs(t0, y0), dtype=np.float64), 0, t0)

    for k in range(1, n_steps + 1):
        t_k = t0 + k * dt
        mem_p = f[:k].T @ b[k:0:-1]
        mem_c = a0[k - 1] * f[0]
        if k > 1:
            mem_c = mem_c + f[1:k].T @ g[k - 1:0:-1]
        v = _check_state(y0 + c_lin * (f[k - 1] - f[0]) + c_pred * mem_p, k, t_k)
        converged = False
        for _ in range(fp_maxit):
            fv = _check_state(np.asarray(rhs(t_k, v), dtype=np.float64), k, t_k)
            v_new = y0 + c_lin * (fv - f[0]) + c_corr * (mem_c + fv)
            _check_state(v_new, k, t_k)
            if np.max(np.abs(v_new - v)) <= fp_tol * (1.0 + np.max(np.abs(v_new))):
                v = v_new
                converged = True
                break
            v = v_new
        if not converged:
            raise CorrectorError(
                f"fixed-point corrector stalled at step {k} (t = {t_k:g})")
        y[k] = v
        f[k] = _check_state(np.asarray(rhs(t_k, v), dtype=np.float64), k, t_k)
    return y
