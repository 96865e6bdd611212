# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Semantics match ``_pykernels`` exactly; see that module for the reference
documentation.  Compiled without -ffast-math so the Kahan compensation in
the series summation survives optimization.
"""

from libc.math cimport INFINITY, exp, fabs, isfinite, lgamma, log, tgamma

import numpy as np

from ..errors import CorrectorError, DivergenceError, EvaluationError

cdef double EPS = 2.220446049250313e-16


def causal_conv(w, x):
    """y[n] = sum_{m=1..n} w[m] * x[n-m]; w[0] ignored, y[0] = 0."""
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[0]
    if n > 1 and xv.shape[0] < n - 1:
        raise ValueError("x must hold at least len(w) - 1 entries")
    out_arr = np.zeros(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, m
    cdef double acc
    for i in range(1, n):
        acc = 0.0
        for m in range(1, i + 1):
            acc += wv[m] * xv[i - m]
        out[i] = acc
    return out_arr


def ml_series_vec(double alpha, double beta, double rho, z, double tol,
                  int max_terms):
    """Elementwise three-parameter Mittag-Leffler series (Kahan summed)."""
    z_arr = np.ascontiguousarray(z, dtype=np.float64)
    flat = z_arr.reshape(-1)
    cdef double[::1] zv = flat
    out_arr = np.empty(flat.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, npts = zv.shape[0]
    cdef int j
    cdef double base = 1.0 / tgamma(beta)
    cdef double lg_rho = lgamma(rho)
    cdef double zi, logz, sgn, total, comp, prev, sign_j, cj, mag, term, y, t
    cdef bint done

    for i in range(npts):
        zi = zv[i]
        if zi == 0.0:
            out[i] = base
            continue
        logz = log(fabs(zi))
        sgn = -1.0 if zi < 0.0 else 1.0
        total = base
        comp = 0.0
        prev = INFINITY
        sign_j = 1.0
        done = False
        for j in range(1, max_terms + 1):
            cj = lgamma(rho + j) - lg_rho - lgamma(j + 1.0) - lgamma(alpha * j + beta)
            mag = exp(cj + j * logz)
            if not isfinite(mag):
                raise EvaluationError(
                    f"Mittag-Leffler term overflow at j={j} "
                    f"(alpha={alpha}, beta={beta}, rho={rho})")
            sign_j = sign_j * sgn
            term = sign_j * mag
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
            if mag <= tol + 4.0 * EPS * fabs(total) and mag <= prev:
                done = True
                break
            prev = mag
        if not done:
            raise EvaluationError(
                f"Mittag-Leffler series did not converge within {max_terms} "
                f"terms (alpha={alpha}, beta={beta}, rho={rho}, z={zi})")
        out[i] = total
    return out_arr.reshape(z_arr.shape)


cdef int _ensure_finite(double[::1] v, Py_ssize_t step, double t) except -1:
    cdef Py_ssize_t c
    for c in range(v.shape[0]):
        if not isfinite(v[c]):
            raise DivergenceError(step, t)
    return 0


cdef _eval_rhs(object rhs, double t, object y_arr, Py_ssize_t step):
    out = np.asarray(rhs(t, y_arr), dtype=np.float64).reshape(-1)
    _ensure_finite(out, step, t)
    return out


cdef _adams_weights(double alpha, Py_ssize_t n_steps):
    m = np.arange(n_steps + 1, dtype=np.float64)
    b = np.zeros(n_steps + 1)
    b[1:] = m[1:] ** alpha - (m[1:] - 1.0) ** alpha
    g = np.empty(n_steps + 1)
    g[0] = 1.0
    g[1:] = ((m[1:] + 1.0) ** (alpha + 1.0) + (m[1:] - 1.0) ** (alpha + 1.0)
             - 2.0 * m[1:] ** (alpha + 1.0))
    k = np.arange(1, n_steps + 1, dtype=np.float64)
    a0 = (k - 1.0) ** (alpha + 1.0) - (k - 1.0 - alpha) * k**alpha
    return b, g, a0


def caputo_adams(object rhs, double t0, double dt, double alpha, y0,
                 Py_ssize_t n_steps):
    """Fractional Adams-Bashforth-Moulton (PECE), full-memory convolution."""
    cdef double[::1] y0v = np.ascontiguousarray(y0, dtype=np.float64)
    cdef Py_ssize_t n = y0v.shape[0]
    b_arr, g_arr, a0_arr = _adams_weights(alpha, n_steps)
    cdef double[::1] b = b_arr
    cdef double[::1] g = g_arr
    cdef double[::1] a0 = a0_arr
    cdef double gamma1 = tgamma(alpha + 1.0)
    cdef double gamma2 = tgamma(alpha + 2.0)
    cdef double c_pred = dt**alpha / gamma1
    cdef double c_corr = dt**alpha / gamma2

    y_arr = np.empty((n_steps + 1, n))
    f_arr = np.empty((n_steps + 1, n))
    cdef double[:, ::1] y = y_arr
    cdef double[:, ::1] f = f_arr
    cdef Py_ssize_t k, j, c
    cdef double t_k, wgt
    cdef double[::1] fpv

    y_arr[0] = np.asarray(y0v)
    f_arr[0] = _eval_rhs(rhs, t0, y_arr[0].copy(), 0)

    mem_arr = np.empty(n)
    pred_arr = np.empty(n)
    cdef double[::1] mem = mem_arr
    cdef double[::1] pred = pred_arr

    for k in range(1, n_steps + 1):
        t_k = t0 + k * dt
        for c in range(n):
            mem[c] = 0.0
        for j in range(k):
            wgt = b[k - j]
            for c in range(n):
                mem[c] += wgt * f[j, c]
        for c in range(n):
            pred[c] = y0v[c] + c_pred * mem[c]
        _ensure_finite(pred, k, t_k)
        f_pred = _eval_rhs(rhs, t_k, pred_arr.copy(), k)
        fpv = f_pred
        for c in range(n):
            mem[c] = a0[k - 1] * f[0, c]
        for j in range(1, k):
            wgt = g[k - j]
            for c in range(n):
                mem[c] += wgt * f[j, c]
        for c in range(n):
            y[k, c] = y0v[c] + c_corr * (mem[c] + fpv[c])
        _ensure_finite(y[k], k, t_k)
        f_arr[k] = _eval_rhs(rhs, t_k, y_arr[k].copy(), k)
    return y_arr


def abc_adams(object rhs, double t0, double dt, double alpha, double b_norm,
              y0, Py_ssize_t n_steps, double fp_tol, int fp_maxit):
    """Implicit fractional Adams for the ABC fixed-point form."""
    cdef double[::1] y0v = np.ascontiguousarray(y0, dtype=np.float64)
    cdef Py_ssize_t n = y0v.shape[0]
    b_arr, g_arr, a0_arr = _adams_weights(alpha, n_steps)
    cdef double[::1] b = b_arr
    cdef double[::1] g = g_arr
    cdef double[::1] a0 = a0_arr
    cdef double c_lin = (1.0 - alpha) / b_norm
    cdef double c_pred = (alpha / b_norm) * dt**alpha / tgamma(alpha + 1.0)
    cdef double c_corr = (alpha / b_norm) * dt**alpha / tgamma(alpha + 2.0)

    y_arr = np.empty((n_steps + 1, n))
    f_arr = np.empty((n_steps + 1, n))
    cdef double[:, ::1] y = y_arr
    cdef double[:, ::1] f = f_arr
    cdef Py_ssize_t k, j, c
    cdef int it
    cdef double t_k, wgt, diff, scale
    cdef bint converged
    cdef double[::1] fvv

    y_arr[0] = np.asarray(y0v)
    f_arr[0] = _eval_rhs(rhs, t0, y_arr[0].copy(), 0)

    mem_p_arr = np.empty(n)
    mem_c_arr = np.empty(n)
    v_arr = np.empty(n)
    cdef double[::1] mem_p = mem_p_arr
    cdef double[::1] mem_c = mem_c_arr
    cdef double[::1] v = v_arr

    for k in range(1, n_steps + 1):
        t_k = t0 + k * dt
        for c in range(n):
            mem_p[c] = 0.0
            mem_c[c] = a0[k - 1] * f[0, c]
        for j in range(k):
            wgt = b[k - j]
            for c in range(n):
                mem_p[c] += wgt * f[j, c]
        for j in range(1, k):
            wgt = g[k - j]
            for c in range(n):
                mem_c[c] += wgt * f[j, c]
        for c in range(n):
            v[c] = y0v[c] + c_lin * (f[k - 1, c] - f[0, c]) + c_pred * mem_p[c]
        _ensure_finite(v, k, t_k)

        converged = False
        for it in range(fp_maxit):
            fvv = _eval_rhs(rhs, t_k, v_arr.copy(), k)
            diff = 0.0
            scale = 0.0
            for c in range(n):
                wgt = y0v[c] + c_lin * (fvv[c] - f[0, c]) \
                    + c_corr * (mem_c[c] + fvv[c])
                if not isfinite(wgt):
                    raise DivergenceError(k, t_k)
                if fabs(wgt - v[c]) > diff:
                    diff = fabs(wgt - v[c])
                if fabs(wgt) > scale:
                    scale = fabs(wgt)
                v[c] = wgt
            if diff <= fp_tol * (1.0 + scale):
                converged = True
                break
        if not converged:
            raise CorrectorError(
                f"fixed-point corrector stalled at step {k} (t = {t_k:g})")
        for c in range(n):
            y[k, c] = v[c]
        f_arr[k] = _eval_rhs(rhs, t_k, y_arr[k].copy(), k)
    return y_arr
