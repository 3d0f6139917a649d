# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 kernels for mean-field orbits and tangent-space propagation.

Contract mirrors _orbit_py.evolve_batch; per-trajectory C loops instead of
batched NumPy array ops, with divergence checked every integration step.
"""

from libc.math cimport hypot, isfinite, log

import numpy as np

cdef double DIVERGE_R2 = 1.0e6


cdef inline void _deriv(double x, double p,
                        double v11, double v12, double v21, double v22,
                        double er, double ei,
                        double detuning, double kerr, double kappa,
                        bint tangent, double* out) noexcept nogil:
    cdef double r2 = x * x + p * p
    cdef double j11, j12, j21, j22
    out[0] = -0.5 * kappa * x - detuning * p + kerr * r2 * p + ei * x - er * p
    out[1] = detuning * x - kerr * r2 * x - 0.5 * kappa * p - er * x - ei * p
    if tangent:
        j11 = -0.5 * kappa + 2.0 * kerr * x * p + ei
        j12 = -detuning + kerr * (x * x + 3.0 * p * p) - er
        j21 = detuning - kerr * (3.0 * x * x + p * p) - er
        j22 = -0.5 * kappa - 2.0 * kerr * x * p - ei
        out[2] = j11 * v11 + j12 * v21
        out[3] = j11 * v12 + j12 * v22
        out[4] = j21 * v11 + j22 * v21
        out[5] = j21 * v12 + j22 * v22


def evolve_batch(alpha0, eps_first, eps_second,
                 double detuning, double kerr, double kappa, double period,
                 int steps_per_half, int transient_periods, int record_periods,
                 bint with_tangent=True):
    """Stroboscopic evolution of a batch of trajectories (compiled twin)."""
    a0 = np.ascontiguousarray(np.atleast_1d(np.asarray(alpha0, dtype=np.complex128)))
    cdef Py_ssize_t n = a0.shape[0]
    e1 = np.ascontiguousarray(
        np.broadcast_to(np.asarray(eps_first, dtype=np.complex128), (n,)).astype(np.complex128))
    e2 = np.ascontiguousarray(
        np.broadcast_to(np.asarray(eps_second, dtype=np.complex128), (n,)).astype(np.complex128))
    if steps_per_half < 1 or transient_periods < 0 or record_periods < 1:
        raise ValueError("invalid period/step counts")

    samples = np.full((n, record_periods), np.nan + 0j, dtype=np.complex128)
    lyapunov = np.full(n, np.nan)
    diverged = np.zeros(n, dtype=np.uint8)
    final = np.full(n, np.nan + 0j, dtype=np.complex128)

    cdef double complex[::1] a0v = a0
    cdef double complex[::1] e1v = e1
    cdef double complex[::1] e2v = e2
    cdef double complex[:, ::1] smp = samples
    cdef double complex[::1] fin = final
    cdef double[::1] lya = lyapunov
    cdef unsigned char[::1] dvg = diverged

    cdef double dt = (period / 2.0) / steps_per_half
    cdef int total = transient_periods + record_periods
    cdef Py_ssize_t i
    cdef int k, half, s
    cdef bint dead
    cdef double x, p, v11, v12, v21, v22, er, ei, logsum
    cdef double r11, r12, r22, q11, q21, u12, u22
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]

    with nogil:
        for i in range(n):
            x = a0v[i].real
            p = a0v[i].imag
            v11 = 1.0; v12 = 0.0; v21 = 0.0; v22 = 1.0
            logsum = 0.0
            dead = 0
            for k in range(total):
                if dead:
                    break
                if k >= transient_periods:
                    smp[i, k - transient_periods] = x + 1j * p
                for half in range(2):
                    if half == 0:
                        er = e1v[i].real; ei = e1v[i].imag
                    else:
                        er = e2v[i].real; ei = e2v[i].imag
                    for s in range(steps_per_half):
                        _deriv(x, p, v11, v12, v21, v22,
                               er, ei, detuning, kerr, kappa, with_tangent, k1)
                        _deriv(x + 0.5 * dt * k1[0], p + 0.5 * dt * k1[1],
                               v11 + 0.5 * dt * k1[2], v12 + 0.5 * dt * k1[3],
                               v21 + 0.5 * dt * k1[4], v22 + 0.5 * dt * k1[5],
                               er, ei, detuning, kerr, kappa, with_tangent, k2)
                        _deriv(x + 0.5 * dt * k2[0], p + 0.5 * dt * k2[1],
                               v11 + 0.5 * dt * k2[2], v12 + 0.5 * dt * k2[3],
                               v21 + 0.5 * dt * k2[4], v22 + 0.5 * dt * k2[5],
                               er, ei, detuning, kerr, kappa, with_tangent, k3)
                        _deriv(x + dt * k3[0], p + dt * k3[1],
                               v11 + dt * k3[2], v12 + dt * k3[3],
                               v21 + dt * k3[4], v22 + dt * k3[5],
                               er, ei, detuning, kerr, kappa, with_tangent, k4)
                        x = x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
                        p = p + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
                        if with_tangent:
                            v11 = v11 + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
                            v12 = v12 + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
                            v21 = v21 + dt / 6.0 * (k1[4] + 2.0 * k2[4] + 2.0 * k3[4] + k4[4])
                            v22 = v22 + dt / 6.0 * (k1[5] + 2.0 * k2[5] + 2.0 * k3[5] + k4[5])
                        if x * x + p * p > DIVERGE_R2 or not isfinite(x) or not isfinite(p):
                            dead = 1
                            break
                    if dead:
                        break
                if dead:
                    break
                if with_tangent:
                    r11 = hypot(v11, v21)
                    q11 = v11 / r11; q21 = v21 / r11
                    r12 = q11 * v12 + q21 * v22
                    u12 = v12 - r12 * q11; u22 = v22 - r12 * q21
                    r22 = hypot(u12, u22)
                    v11 = q11; v21 = q21
                    v12 = u12 / r22; v22 = u22 / r22
                    if k >= transient_periods:
                        logsum += log(r11)
            if dead:
                dvg[i] = 1
            else:
                fin[i] = x + 1j * p
                if with_tangent:
                    lya[i] = logsum / (record_periods * period)

    return samples, lyapunov, diverged.astype(bool), final
