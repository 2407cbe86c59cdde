# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False
"""Compiled Dormand-Prince 5(4) stepper for dy/dt = L @ y with constant L.

Hot kernel of the package: the whole adaptive loop runs in C with BLAS zgemv
matvecs, no per-step Python overhead.  Must stay algorithm-identical to the
pure-numpy twin in ``_dp45_py.py`` (same tableau, error norm, controller,
initial-step heuristic); ``tests/test_backend.py`` enforces the agreement.
"""

import numpy as np

from libc.math cimport sqrt, pow
from scipy.linalg.cython_blas cimport zgemv

ctypedef double complex zdouble

DEF MAX_FACTOR = 10.0
DEF MIN_FACTOR = 0.2
DEF SAFETY = 0.9

DEF STATUS_OK = 0
DEF STATUS_UNDERFLOW = 1
DEF STATUS_MAX_STEPS = 2


cdef inline void _matvec(int n, zdouble* L, zdouble* x, zdouble* out) noexcept nogil:
    cdef zdouble one = 1.0, zero = 0.0
    cdef int inc = 1
    # row-major L viewed as column-major is L^T, so 'T' computes L @ x
    zgemv("T", &n, &n, &one, L, &n, x, &inc, &zero, out, &inc)


cdef inline double _cabs2(zdouble z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef double _error_norm(int n, zdouble* err, zdouble* y0, zdouble* y1,
                        double rtol, double atol) noexcept nogil:
    cdef double acc = 0.0, sc, a0, a1
    cdef int i
    for i in range(n):
        a0 = sqrt(_cabs2(y0[i]))
        a1 = sqrt(_cabs2(y1[i]))
        sc = atol + rtol * (a0 if a0 > a1 else a1)
        acc += _cabs2(err[i]) / (sc * sc)
    return sqrt(acc / n)


cdef double _scaled_rms(int n, zdouble* v, zdouble* y, double rtol,
                        double atol) noexcept nogil:
    cdef double acc = 0.0, sc
    cdef int i
    for i in range(n):
        sc = atol + rtol * sqrt(_cabs2(y[i]))
        acc += _cabs2(v[i]) / (sc * sc)
    return sqrt(acc / n)


cdef void _herm_project(int hd, zdouble* y) noexcept nogil:
    """Project vec of an hd x hd matrix onto its Hermitian part in place."""
    cdef int i, j
    cdef double ar, ai
    for i in range(hd):
        y[i * hd + i] = y[i * hd + i].real
        for j in range(i + 1, hd):
            ar = 0.5 * (y[i * hd + j].real + y[j * hd + i].real)
            ai = 0.5 * (y[i * hd + j].imag - y[j * hd + i].imag)
            y[i * hd + j] = ar + 1j * ai
            y[j * hd + i] = ar - 1j * ai


def dp45_evolve(L, y0, t_eval, double rtol, double atol,
                long max_steps=50_000_000, int herm_dim=0):
    """Same contract as ``_dp45_py.dp45_evolve``."""
    cdef zdouble[:, ::1] Lv = np.ascontiguousarray(L, dtype=np.complex128)
    cdef zdouble[::1] y = np.array(y0, dtype=np.complex128, copy=True)
    cdef double[::1] tv = np.asarray(t_eval, dtype=np.float64)

    cdef int n = y.shape[0]
    cdef int n_out = tv.shape[0]
    out_arr = np.empty((n_out, n), dtype=np.complex128)
    cdef zdouble[:, ::1] out = out_arr
    cdef int i
    for i in range(n):
        out[0, i] = y[i]

    cdef double t = tv[0]
    cdef double t_end = tv[n_out - 1]
    if n_out == 1 or t_end == t:
        for i in range(1, n_out):
            out[i, :] = y
        return out_arr, {"status": STATUS_OK, "t_final": t, "steps": 0,
                         "rejected": 0}

    cdef double span = t_end - t
    cdef double h_min_abs = 1e-14 * span

    # stage buffers
    k_arr = np.empty((7, n), dtype=np.complex128)
    cdef zdouble[:, ::1] k = k_arr
    tmp_arr = np.empty(n, dtype=np.complex128)
    cdef zdouble[::1] ytmp = tmp_arr
    ynew_arr = np.empty(n, dtype=np.complex128)
    cdef zdouble[::1] ynew = ynew_arr
    err_arr = np.empty(n, dtype=np.complex128)
    cdef zdouble[::1] yerr = err_arr

    cdef zdouble* Lp = &Lv[0, 0]
    cdef zdouble* yp = &y[0]

    # Dormand-Prince tableau
    cdef double a21 = 1.0 / 5.0
    cdef double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0
    cdef double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0
    cdef double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0
    cdef double a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0
    cdef double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0
    cdef double a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0
    cdef double a65 = -5103.0 / 18656.0
    cdef double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0
    cdef double b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0
    cdef double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0
    cdef double e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0

    cdef double h, h_try, h0, h1, d0, d1, d2, dm, norm, factor, t_next
    cdef long steps = 0, rejected = 0
    cdef int idx = 1, status = STATUS_OK, clamped

    with nogil:
        # initial-step heuristic (identical to the python twin)
        _matvec(n, Lp, yp, &k[0, 0])
        d0 = _scaled_rms(n, yp, yp, rtol, atol)
        d1 = _scaled_rms(n, &k[0, 0], yp, rtol, atol)
        if d0 < 1e-5 or d1 < 1e-5:
            h0 = 1e-6 * span
        else:
            h0 = 0.01 * d0 / d1
        for i in range(n):
            ytmp[i] = y[i] + h0 * k[0, i]
        _matvec(n, Lp, &ytmp[0], &k[1, 0])
        for i in range(n):
            yerr[i] = k[1, i] - k[0, i]
        d2 = _scaled_rms(n, &yerr[0], yp, rtol, atol) / h0
        dm = d1 if d1 > d2 else d2
        if dm > 1e-15:
            h1 = pow(0.01 / dm, 0.2)
        else:
            h1 = 1e-6 * span if 1e-6 * span > h0 * 1e-3 else h0 * 1e-3
        h = 100.0 * h0
        if h1 < h:
            h = h1
        if span < h:
            h = span

        while idx < n_out:
            if steps >= max_steps:
                status = STATUS_MAX_STEPS
                break
            t_next = tv[idx]
            clamped = 0
            h_try = h
            if t + h_try >= t_next:
                h_try = t_next - t
                clamped = 1
            if h_try < h_min_abs and not clamped:
                status = STATUS_UNDERFLOW
                break

            for i in range(n):
                ytmp[i] = y[i] + h_try * (a21 * k[0, i])
            _matvec(n, Lp, &ytmp[0], &k[1, 0])
            for i in range(n):
                ytmp[i] = y[i] + h_try * (a31 * k[0, i] + a32 * k[1, i])
            _matvec(n, Lp, &ytmp[0], &k[2, 0])
            for i in range(n):
                ytmp[i] = y[i] + h_try * (a41 * k[0, i] + a42 * k[1, i]
                                          + a43 * k[2, i])
            _matvec(n, Lp, &ytmp[0], &k[3, 0])
            for i in range(n):
                ytmp[i] = y[i] + h_try * (a51 * k[0, i] + a52 * k[1, i]
                                          + a53 * k[2, i] + a54 * k[3, i])
            _matvec(n, Lp, &ytmp[0], &k[4, 0])
            for i in range(n):
                ytmp[i] = y[i] + h_try * (a61 * k[0, i] + a62 * k[1, i]
                                          + a63 * k[2, i] + a64 * k[3, i]
                                          + a65 * k[4, i])
            _matvec(n, Lp, &ytmp[0], &k[5, 0])
            for i in range(n):
                ynew[i] = y[i] + h_try * (b1 * k[0, i] + b3 * k[2, i]
                                          + b4 * k[3, i] + b5 * k[4, i]
                                          + b6 * k[5, i])
            _matvec(n, Lp, &ynew[0], &k[6, 0])
            for i in range(n):
                yerr[i] = h_try * (e1 * k[0, i] + e3 * k[2, i] + e4 * k[3, i]
                                   + e5 * k[4, i] + e6 * k[5, i]
                                   + e7 * k[6, i])
            steps += 1
            norm = _error_norm(n, &yerr[0], yp, &ynew[0], rtol, atol)

            if norm <= 1.0:
                t = t_next if clamped else t + h_try
                for i in range(n):
                    y[i] = ynew[i]
                    k[0, i] = k[6, i]          # FSAL
                if herm_dim:
                    _herm_project(herm_dim, yp)
                if norm == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = SAFETY * pow(norm, -0.2)
                    if factor > MAX_FACTOR:
                        factor = MAX_FACTOR
                if factor < MIN_FACTOR:
                    factor = MIN_FACTOR
                h = h_try * factor
                if clamped:
                    for i in range(n):
                        out[idx, i] = y[i]
                    idx += 1
            else:
                rejected += 1
                factor = SAFETY * pow(norm, -0.2)
                if factor < MIN_FACTOR:
                    factor = MIN_FACTOR
                h = h_try * factor
                if h < h_min_abs:
                    status = STATUS_UNDERFLOW
                    break

    if status != STATUS_OK:
        out_arr[idx:] = np.nan
    return out_arr, {"status": status, "t_final": t, "steps": steps,
                     "rejected": rejected}
