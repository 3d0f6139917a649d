"""NumPy fallback kernels for mean-field orbit integration.

Same contract as the compiled module _orbit_cy: fixed-step RK4 on the
mean-field flow

    d(alpha)/dt = (-kappa/2 + i*detuning - i*kerr*|alpha|^2) alpha - i*eps(t)*conj(alpha)

in real coordinates alpha = x + i p, with the two-step drive switching
exactly at half-period boundaries, optional tangent-space propagation of the
real 2x2 Jacobian for the largest Lyapunov exponent, stroboscopic sampling at
period starts, and an |alpha| > 1e3 divergence guard. Vectorized over a batch
of trajectories; divergence here is detected at half-period granularity
(the compiled kernel checks every step), after which a trajectory's samples
and exponent are NaN.
"""

from __future__ import annotations

import numpy as np

DIVERGENCE_RADIUS_SQ = 1.0e6


def _deriv(x, p, er, ei, detuning, kerr, kappa, tangent):
    r2 = x * x + p * p
    fx = -0.5 * kappa * x - detuning * p + kerr * r2 * p + ei * x - er * p
    fp = detuning * x - kerr * r2 * x - 0.5 * kappa * p - er * x - ei * p
    if tangent is None:
        return fx, fp, None
    v11, v12, v21, v22 = tangent
    j11 = -0.5 * kappa + 2.0 * kerr * x * p + ei
    j12 = -detuning + kerr * (x * x + 3.0 * p * p) - er
    j21 = detuning - kerr * (3.0 * x * x + p * p) - er
    j22 = -0.5 * kappa - 2.0 * kerr * x * p - ei
    dv = (
        j11 * v11 + j12 * v21,
        j11 * v12 + j12 * v22,
        j21 * v11 + j22 * v21,
        j21 * v12 + j22 * v22,
    )
    return fx, fp, dv


def _rk4_half_period(x, p, tangent, er, ei, dt, steps, detuning, kerr, kappa):
    for _ in range(steps):
        k1 = _deriv(x, p, er, ei, detuning, kerr, kappa, tangent)
        t2 = None if tangent is None else tuple(
            v + 0.5 * dt * d for v, d in zip(tangent, k1[2])
        )
        k2 = _deriv(x + 0.5 * dt * k1[0], p + 0.5 * dt * k1[1], er, ei, detuning, kerr, kappa, t2)
        t3 = None if tangent is None else tuple(
            v + 0.5 * dt * d for v, d in zip(tangent, k2[2])
        )
        k3 = _deriv(x + 0.5 * dt * k2[0], p + 0.5 * dt * k2[1], er, ei, detuning, kerr, kappa, t3)
        t4 = None if tangent is None else tuple(
            v + dt * d for v, d in zip(tangent, k3[2])
        )
        k4 = _deriv(x + dt * k3[0], p + dt * k3[1], er, ei, detuning, kerr, kappa, t4)
        x = x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        p = p + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        if tangent is not None:
            tangent = tuple(
                v + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
                for v, a, b, c, d in zip(tangent, k1[2], k2[2], k3[2], k4[2])
            )
    return x, p, tangent


def evolve_batch(
    alpha0,
    eps_first,
    eps_second,
    detuning,
    kerr,
    kappa,
    period,
    steps_per_half,
    transient_periods,
    record_periods,
    with_tangent=True,
):
    """Stroboscopic evolution of a batch of trajectories.

    Returns (samples, lyapunov, diverged, final): samples has shape
    (n, record_periods) and holds alpha at the start of each recorded period;
    lyapunov is the largest exponent (NaN without tangent propagation or on
    divergence); final is alpha after the last period.
    """
    a0 = np.atleast_1d(np.asarray(alpha0, dtype=complex))
    n = a0.size
    e1 = np.broadcast_to(np.asarray(eps_first, dtype=complex), (n,)).astype(complex)
    e2 = np.broadcast_to(np.asarray(eps_second, dtype=complex), (n,)).astype(complex)
    if steps_per_half < 1 or transient_periods < 0 or record_periods < 1:
        raise ValueError("invalid period/step counts")

    x = a0.real.astype(float).copy()
    p = a0.imag.astype(float).copy()
    tangent = None
    if with_tangent:
        tangent = (np.ones(n), np.zeros(n), np.zeros(n), np.ones(n))
    log_stretch = np.zeros(n)
    samples = np.full((n, record_periods), np.nan + 0j, dtype=complex)
    diverged = np.zeros(n, dtype=bool)
    dt = (period / 2.0) / steps_per_half

    halves = ((e1.real, e1.imag), (e2.real, e2.imag))
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        for k in range(transient_periods + record_periods):
            if k >= transient_periods:
                samples[:, k - transient_periods] = x + 1j * p
            for er, ei in halves:
                x, p, tangent = _rk4_half_period(
                    x, p, tangent, er, ei, dt, steps_per_half, detuning, kerr, kappa
                )
                bad = ~(x * x + p * p <= DIVERGENCE_RADIUS_SQ)  # catches NaN too
                if bad.any():
                    diverged |= bad
                    x = np.where(diverged, np.nan, x)
                    p = np.where(diverged, np.nan, p)
            if with_tangent:
                v11, v12, v21, v22 = tangent
                r11 = np.hypot(v11, v21)
                q11, q21 = v11 / r11, v21 / r11
                r12 = q11 * v12 + q21 * v22
                w12, w22 = v12 - r12 * q11, v22 - r12 * q21
                r22 = np.hypot(w12, w22)
                tangent = (q11, w12 / r22, q21, w22 / r22)
                if k >= transient_periods:
                    log_stretch += np.log(r11)

    lyapunov = np.full(n, np.nan)
    if with_tangent:
        lyapunov = log_stretch / (record_periods * period)
    lyapunov[diverged] = np.nan
    final = np.where(diverged, np.nan + 0j, x + 1j * p)
    return samples, lyapunov, diverged, final
