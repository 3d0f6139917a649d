"""One-period propagator, effective spectrum, quasi-steady state and dissipative gaps.

The effective generator is realized through its spectrum only: eigenvalues of
the one-period propagator are mapped through the principal logarithm
lambda = (ln|mu| + i arg mu)/T with arg in (-pi, pi]. No matrix logarithm is
ever formed; the steady state is the devectorized eigenvector of the
eigenvalue closest to 1.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DegenerateSteady, ExpFailure, NoRealEigenvalue, NotPositive
from .fock import DensityMatrix, DriveProtocol, FockSpace
from .liouville import Superoperator, devectorize, liouvillian_pair

log = logging.getLogger(__name__)

SPECTRAL_RADIUS_TOL = 1e-8
STEADY_TOL = 1e-8


def _expm_pade(mat: np.ndarray) -> np.ndarray:
    out = sla.expm(mat)
    if not np.all(np.isfinite(out)):
        raise ExpFailure("scaling-and-squaring exponential returned non-finite entries")
    return out


def _expm_eig(mat: np.ndarray, cond_limit=1e8) -> np.ndarray:
    w, v = sla.eig(mat)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > cond_limit:
        raise ExpFailure(f"eigenvector condition number {cond:.2e} exceeds {cond_limit:.0e}")
    out = (v * np.exp(w)) @ np.linalg.inv(v)
    if not np.all(np.isfinite(out)):
        raise ExpFailure("eigendecomposition exponential returned non-finite entries")
    return out


def propagator_exponential(mat: np.ndarray, method: str = "pade") -> np.ndarray:
    """expm by Pade scaling-and-squaring (default) or eigendecomposition."""
    if method == "pade":
        try:
            return _expm_pade(mat)
        except ExpFailure:
            log.warning("Pade exponential failed; retrying via eigendecomposition")
            return _expm_eig(mat)
    if method == "eig":
        return _expm_eig(mat)
    raise ValueError(f"unknown exponential method {method!r}")


def floquet_propagator(
    protocol: DriveProtocol, space: FockSpace, method: str = "pade"
) -> Superoperator:
    """One-period map U(T) = exp(L2 T/2) exp(L1 T/2).

    The first half of the drive acts first in time, so its exponential is the
    rightmost factor. Requires kappa > 0 (the spectral machinery downstream
    assumes a contracting map with a unique fixed point).
    """
    if protocol.kappa <= 0:
        raise ValueError("floquet_propagator requires kappa > 0")
    l1, l2 = liouvillian_pair(protocol, space)
    half = protocol.half_period
    u = propagator_exponential(l2.matrix * half, method) @ propagator_exponential(
        l1.matrix * half, method
    )
    return Superoperator(space, u, f"U(T={protocol.period})")


@dataclass
class FloquetSpectrum:
    """Eigendecomposition of the one-period propagator.

    propagator_eigenvalues: mu_k, |mu_k| <= 1 + 1e-8
    effective_eigenvalues: lambda_k = (ln|mu_k| + i arg mu_k)/T, arg in (-pi, pi]
    eigenvectors: right eigenvectors as columns, aligned with mu_k
    steady_index: k with mu_k closest to 1
    """

    space: FockSpace
    period: float
    propagator_eigenvalues: np.ndarray
    effective_eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    steady_index: int


def effective_spectrum(propagator: Superoperator, period: float) -> FloquetSpectrum:
    """Full dense eigendecomposition of U(T), mapped through the principal log."""
    mu, vecs = sla.eig(propagator.matrix)
    radius = float(np.abs(mu).max())
    if radius > 1.0 + SPECTRAL_RADIUS_TOL:
        raise ExpFailure(
            f"propagator spectral radius {radius - 1.0:.3e} above 1; not a contraction"
        )
    near_one = np.abs(mu - 1.0) < STEADY_TOL
    if int(near_one.sum()) > 1:
        raise DegenerateSteady(
            f"{int(near_one.sum())} propagator eigenvalues within {STEADY_TOL:.0e} of 1"
        )
    steady = int(np.argmin(np.abs(mu - 1.0)))
    with np.errstate(divide="ignore"):
        lam = (np.log(np.abs(mu)) + 1j * np.angle(mu)) / period
    return FloquetSpectrum(
        space=propagator.space,
        period=period,
        propagator_eigenvalues=mu,
        effective_eigenvalues=lam,
        eigenvectors=vecs,
        steady_index=steady,
    )


def steady_state(spectrum: FloquetSpectrum) -> DensityMatrix:
    """Devectorize, Hermitize and normalize the fixed-point eigenvector.

    Warns if the smallest eigenvalue dips below -1e-6 and raises NotPositive
    below -1e-4 (the usual signature of a too-small cutoff).
    """
    d = spectrum.space.dim
    rho = devectorize(spectrum.eigenvectors[:, spectrum.steady_index], d)
    rho = (rho + rho.conj().T) / 2.0
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise NotPositive("steady eigenvector has (near) zero trace")
    rho = rho / tr
    low = float(np.linalg.eigvalsh(rho).min())
    if low < -1e-4:
        raise NotPositive(
            f"steady state eigenvalue {low:.3e} below -1e-4; increase the cutoff"
        )
    if low < -1e-6:
        warnings.warn(
            f"steady state marginally non-positive (min eigenvalue {low:.3e})",
            stacklevel=2,
        )
    return DensityMatrix(spectrum.space, rho)


@dataclass(frozen=True)
class GapReport:
    """Dissipative gaps of an effective spectrum.

    gap_t: -max Re(lambda) over all nonzero eigenvalues (steady mode excluded)
    gap_p: same maximization restricted to (numerically) real eigenvalues
    dominant_phase: |Im(lambda) * T| of the modes attaining gap_t
    period_doubled: dominant phase within 1e-3 of pi
    """

    gap_t: float
    gap_p: float
    dominant_phase: float
    period_doubled: bool


PERIOD_DOUBLING_PHASE_TOL = 1e-3


def gaps(spectrum: FloquetSpectrum, tol_real: float = 1e-6, tol_zero: float = 1e-8) -> GapReport:
    """Extract the two dissipative gaps.

    The steady mode is excluded by index (not by threshold alone, so that
    near-degenerate closings survive); remaining eigenvalues with
    |lambda| <= tol_zero are treated as spurious zeros. An eigenvalue counts
    as real when |Im(lambda)| * T <= tol_real. Raises NoRealEigenvalue when
    the real candidate set is empty: the real-axis gap is undefined, not 0.
    """
    lam = spectrum.effective_eigenvalues
    period = spectrum.period
    keep = np.ones(lam.shape, dtype=bool)
    keep[spectrum.steady_index] = False
    keep &= np.abs(lam) > tol_zero
    if not keep.any():
        raise NoRealEigenvalue("spectrum has no nonzero eigenvalues at all")
    candidates = lam[keep]
    max_re = float(candidates.real.max())
    gap_t = -max_re
    attaining = candidates[candidates.real >= max_re - 1e-10]
    dominant_phase = float(np.max(np.abs(attaining.imag * period)))
    doubled = abs(dominant_phase - np.pi) <= PERIOD_DOUBLING_PHASE_TOL

    real_mask = np.abs(candidates.imag) * period <= tol_real
    if not real_mask.any():
        raise NoRealEigenvalue(
            f"no nonzero eigenvalue is real to |Im|*T <= {tol_real:.0e}"
        )
    gap_p = -float(candidates.real[real_mask].max())
    # empirical observation worth tracking: the real-axis gap often equals
    # the smallest |lambda| among all nonzero modes
    min_abs = float(np.abs(candidates).min())
    log.info(
        "gap_p=%.6g equals min|lambda|=%.6g: %s",
        gap_p,
        min_abs,
        abs(gap_p - min_abs) <= 1e-9 * max(1.0, abs(gap_p)),
    )
    return GapReport(
        gap_t=gap_t,
        gap_p=gap_p,
        dominant_phase=dominant_phase,
        period_doubled=doubled,
    )
