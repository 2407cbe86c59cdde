"""Pure-numpy Dormand-Prince 5(4) stepper for dy/dt = L @ y with constant L.

Twin of the compiled kernel in ``_dp45_cy.pyx``: identical tableau, error
norm, controller and initial-step heuristic, so both backends produce the
same trajectories up to floating-point noise.  Output times are hit exactly
by clamping the step, which costs little because the natural step is much
smaller than any reasonable output spacing.
"""

import math

import numpy as np

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = (9017 / 3168, -355 / 33, 46732 / 5247,
                           49 / 176, -5103 / 18656)
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# y5 - y4 error weights (stage 2 weight is zero)
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                          -17253 / 339200, 22 / 525, -1 / 40)

MAX_FACTOR = 10.0
MIN_FACTOR = 0.2
SAFETY = 0.9

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


def _error_norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return math.sqrt(float(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(L, y0, f0, t_span, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = math.sqrt(float(np.mean(np.abs(y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean(np.abs(f0 / scale) ** 2)))
    h0 = 1e-6 * t_span if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = L @ y1
    d2 = math.sqrt(float(np.mean(np.abs((f1 - f0) / scale) ** 2))) / h0
    dm = max(d1, d2)
    h1 = (0.01 / dm) ** 0.2 if dm > 1e-15 else max(1e-6 * t_span, h0 * 1e-3)
    return min(100.0 * h0, h1, t_span)


def dp45_evolve(L, y0, t_eval, rtol, atol, max_steps=50_000_000,
                herm_dim=0):
    """Integrate dy/dt = L y from t_eval[0], sampling y at every t_eval.

    When ``herm_dim`` is nonzero, y is the row-major vectorization of a
    herm_dim x herm_dim Hermitian matrix and the flow preserves that
    subspace exactly; each accepted step is then projected back onto it,
    which strips the anti-Hermitian floating-point noise without touching
    the signal (standard invariant-manifold projection).

    Returns (Y, info) with Y of shape (len(t_eval), n) and info a dict with
    keys ``status`` (0 ok, 1 step underflow, 2 step budget exhausted),
    ``t_final``, ``steps`` and ``rejected``.
    """
    L = np.ascontiguousarray(L, dtype=np.complex128)
    y = np.array(y0, dtype=np.complex128, copy=True)
    t_eval = np.asarray(t_eval, dtype=np.float64)
    n_out = t_eval.size
    out = np.empty((n_out, y.size), dtype=np.complex128)
    out[0] = y

    t = float(t_eval[0])
    t_end = float(t_eval[-1])
    if n_out == 1 or t_end == t:
        out[:] = y
        return out, {"status": STATUS_OK, "t_final": t, "steps": 0,
                     "rejected": 0}

    span = t_end - t
    h_min_abs = 1e-14 * span
    k1 = L @ y
    h = _initial_step(L, y, k1, span, rtol, atol)

    idx = 1
    steps = 0
    rejected = 0
    status = STATUS_OK
    while idx < n_out:
        if steps >= max_steps:
            status = STATUS_MAX_STEPS
            break
        t_next = float(t_eval[idx])
        clamped = False
        h_try = h
        if t + h_try >= t_next:
            h_try = t_next - t
            clamped = True
        if h_try < h_min_abs and not clamped:
            status = STATUS_UNDERFLOW
            break

        k2 = L @ (y + h_try * (A21 * k1))
        k3 = L @ (y + h_try * (A31 * k1 + A32 * k2))
        k4 = L @ (y + h_try * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = L @ (y + h_try * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        k6 = L @ (y + h_try * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4
                               + A65 * k5))
        y_new = y + h_try * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = L @ y_new
        err = h_try * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6
                       + E7 * k7)
        steps += 1
        norm = _error_norm(err, y, y_new, rtol, atol)

        if norm <= 1.0:
            t = t_next if clamped else t + h_try
            y = y_new
            if herm_dim:
                m = y.reshape(herm_dim, herm_dim)
                y = (0.5 * (m + m.conj().T)).reshape(-1)
            k1 = k7
            factor = MAX_FACTOR if norm == 0.0 else min(
                MAX_FACTOR, SAFETY * norm ** -0.2)
            h = h_try * max(MIN_FACTOR, factor)
            if clamped:
                out[idx] = y
                idx += 1
        else:
            rejected += 1
            h = h_try * max(MIN_FACTOR, SAFETY * norm ** -0.2)
            if h < h_min_abs:
                status = STATUS_UNDERFLOW
                break

    if status != STATUS_OK:
        out[idx:] = np.nan
    return out, {"status": status, "t_final": t, "steps": steps,
                 "rejected": rejected}
