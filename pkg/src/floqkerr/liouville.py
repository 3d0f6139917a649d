"""Lindblad generator as a dense superoperator, plus a fixed-step master-equation integrator.

Vectorization is column-stacking throughout: vec(A X B) = (B^T kron A) vec(X),
realized with numpy order='F' reshapes. The master equation implemented is

    drho/dt = i[rho, H] + kappa * (a rho a+ - (a+a rho + rho a+a)/2)

with the +i commutator ordering (equivalent to the usual -i[H, rho]); spectra
produced here keep that sign so the decay rates land in the left half plane.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, StepTooLarge
from .fock import (
    DensityMatrix,
    DriveProtocol,
    FockOperator,
    FockSpace,
    annihilation,
    hamiltonian_pair,
)

log = logging.getLogger(__name__)

MAX_TRACE_DRIFT_PER_PERIOD = 1e-6


@dataclass(frozen=True)
class Superoperator:
    """Dense D^2 x D^2 matrix acting on column-stacked density matrices."""

    space: FockSpace
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        d2 = self.space.dim**2
        if self.matrix.shape != (d2, d2):
            raise DimensionMismatch(
                f"superoperator {self.label!r} has shape {self.matrix.shape}, expected {(d2, d2)}"
            )


def vectorize(mat: np.ndarray) -> np.ndarray:
    """Column-stacking vec: stacks columns, vec(X)[i + j*D] = X[i, j]."""
    return np.asarray(mat).reshape(-1, order="F")


def devectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vec).reshape(dim, dim, order="F")


def build_liouvillian(h: FockOperator, kappa: float) -> Superoperator:
    """Lindblad generator for Hamiltonian h and single-photon loss at rate kappa.

    L = i (H^T kron 1 - 1 kron H)
        + kappa * (conj(a) kron a - (1/2) 1 kron a+a - (1/2) (a+a)^T kron 1)
    """
    if kappa < 0:
        raise ValueError(f"kappa must be non-negative, got {kappa}")
    hm = h.matrix
    if np.max(np.abs(hm - hm.conj().T)) != 0.0:
        raise ValueError("Hamiltonian must be exactly Hermitian")
    space = h.space
    d = space.dim
    eye = np.eye(d, dtype=complex)
    a = annihilation(space).matrix
    n = a.conj().T @ a
    mat = 1j * (np.kron(hm.T, eye) - np.kron(eye, hm))
    if kappa > 0:
        mat += kappa * (
            np.kron(a.conj(), a) - 0.5 * np.kron(eye, n) - 0.5 * np.kron(n.T, eye)
        )
    return Superoperator(space, mat, f"L[{h.label}]")


def liouvillian_pair(protocol: DriveProtocol, space: FockSpace):
    """Generators for the two halves of the drive period, in time order."""
    h1, h2 = hamiltonian_pair(space, protocol)
    return (
        build_liouvillian(h1, protocol.kappa),
        build_liouvillian(h2, protocol.kappa),
    )


def apply(superop: Superoperator, rho) -> np.ndarray:
    """Matrix form of L rho: vectorize, multiply, devectorize."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    d = superop.space.dim
    if mat.shape != (d, d):
        raise DimensionMismatch(f"state shape {mat.shape} does not match cutoff {d}")
    return devectorize(superop.matrix @ vectorize(mat), d)


def rk4_step_matrix(superop: Superoperator, dt: float) -> np.ndarray:
    """One-step update matrix of classical RK4 on the linear flow v' = L v.

    For an autonomous linear system the four RK4 stages collapse exactly to
    the degree-4 Taylor polynomial 1 + A + A^2/2 + A^3/6 + A^4/24, A = dt*L.
    Stepping with this matrix is the RK4 map, one matvec per step.
    """
    a = dt * superop.matrix
    d2 = a.shape[0]
    step = np.eye(d2, dtype=complex) + a
    term = a.copy()
    for k in (2.0, 3.0, 4.0):
        term = term @ a / k
        step += term
    return step


def integrate_master_equation(
    protocol: DriveProtocol,
    rho0: DensityMatrix,
    t_final: float,
    dt: float | None = None,
    collect_drift: bool = False,
):
    """Fixed-step RK4 integration of the piecewise-constant master equation.

    The generator is L1 on [kT, kT + T/2) and L2 on the second half period;
    steps are aligned to the switch times, so dt is rounded down to divide
    T/2 exactly. t_final must be a whole number of periods. The state is
    re-Hermitized and trace-renormalized once per period; the pre-correction
    trace drift is logged, and StepTooLarge is raised if it ever exceeds
    1e-6 in one period.

    Returns the final DensityMatrix, or (state, drift_array) when
    collect_drift is true.
    """
    period = protocol.period
    n_periods = t_final / period
    if abs(n_periods - round(n_periods)) > 1e-9 * max(1.0, abs(n_periods)):
        raise ValueError(f"t_final = {t_final} is not a multiple of the period {period}")
    n_periods = int(round(n_periods))
    if n_periods < 0:
        raise ValueError("t_final must be non-negative")
    if n_periods == 0:
        return (rho0, np.zeros(0)) if collect_drift else rho0

    if dt is None:
        dt = period / 200.0
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    half = protocol.half_period
    steps_per_half = max(1, int(np.ceil(half / dt - 1e-12)))
    dt_eff = half / steps_per_half

    space = rho0.space
    l1, l2 = liouvillian_pair(protocol, space)
    step1 = rk4_step_matrix(l1, dt_eff)
    step2 = rk4_step_matrix(l2, dt_eff)

    d = space.dim
    v = vectorize(rho0.matrix).astype(complex)
    drifts = np.empty(n_periods)
    for k in range(n_periods):
        for step in (step1, step2):
            for _ in range(steps_per_half):
                v = step @ v
        rho = devectorize(v, d)
        tr = np.trace(rho)
        drift = abs(tr - 1.0)
        drifts[k] = drift
        if not np.isfinite(drift) or drift > MAX_TRACE_DRIFT_PER_PERIOD:
            raise StepTooLarge(
                f"trace drift {drift:.3e} in period {k + 1} exceeds "
                f"{MAX_TRACE_DRIFT_PER_PERIOD:.0e}; reduce dt (dt_eff = {dt_eff:.3e})"
            )
        rho = (rho + rho.conj().T) / 2.0
        rho /= np.trace(rho).real
        v = vectorize(rho)

    log.info(
        "integrated %d periods at dt=%.3e; max trace drift %.3e",
        n_periods,
        dt_eff,
        float(drifts.max()),
    )
    out = DensityMatrix(space, devectorize(v, d))
    return (out, drifts) if collect_drift else out
