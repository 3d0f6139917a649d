"""Steady-state observables: occupation, number fluctuations, entropies, the
critical-drive fit and cutoff-convergence certification.

"Number fluctuations" is implemented as the variance <n^2> - <n>^2; the Fano
factor variance/<n> is carried alongside so either reading of the fluctuation
diagnostic can be compared. Entropies use natural logarithms throughout.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NotPositive, TooFewPoints
from .fock import DensityMatrix, DriveProtocol, FockSpace

log = logging.getLogger(__name__)

EIG_DROP = 1e-14
EIG_NEG_FLOOR = -1e-8


def thermal_entropy(mean_occupation: float) -> float:
    """Entropy of a bosonic thermal state with the given mean occupation:

        (n+1) ln(n+1) - n ln(n),  defined as 0 at n = 0.
    """
    na = float(mean_occupation)
    if na < 0:
        raise ValueError(f"mean occupation must be >= 0, got {na}")
    if na == 0.0:
        return 0.0
    return float((na + 1.0) * np.log(na + 1.0) - na * np.log(na))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum p ln p over the spectrum of rho.

    Eigenvalues below 1e-14 are dropped; negative eigenvalues above -1e-8 are
    clipped to zero, anything lower raises NotPositive.
    """
    ev = np.linalg.eigvalsh((rho.matrix + rho.matrix.conj().T) / 2.0)
    low = float(ev.min())
    if low < EIG_NEG_FLOOR:
        raise NotPositive(f"eigenvalue {low:.3e} below {EIG_NEG_FLOOR:.0e}")
    ev = ev[ev > EIG_DROP]
    return float(-np.sum(ev * np.log(ev)))


@dataclass(frozen=True)
class SteadyObservables:
    """Scalar diagnostics of one quasi-steady state."""

    occupation: float  # <n>
    number_variance: float  # <n^2> - <n>^2
    fano: float  # variance / <n>, NaN at zero occupation
    entropy: float  # von Neumann, natural log
    thermal_baseline: float  # thermal entropy at the same occupation
    entropy_ratio: float  # entropy / thermal_baseline, NaN at zero occupation
    wigner_negativity: float | None = None  # filled when a Wigner map was computed


def steady_observables(rho: DensityMatrix, wigner_negativity: float | None = None) -> SteadyObservables:
    d = rho.space.dim
    n = np.arange(d, dtype=float)
    pops = np.real(np.diag(rho.matrix))
    occupation = float(pops @ n)
    variance = float(pops @ n**2 - occupation**2)
    entropy = von_neumann_entropy(rho)
    baseline = thermal_entropy(max(occupation, 0.0))
    return SteadyObservables(
        occupation=occupation,
        number_variance=variance,
        fano=variance / occupation if occupation > 0 else float("nan"),
        entropy=entropy,
        thermal_baseline=baseline,
        entropy_ratio=entropy / baseline if baseline > 0 else float("nan"),
        wigner_negativity=wigner_negativity,
    )


@dataclass(frozen=True)
class FitResult:
    """Fixed-slope fit of occupation against drive strength.

    The model is occupation = (eps0 - eps_c) / kerr with the slope pinned to
    1/kerr; a free-slope least-squares line is reported alongside for
    diagnostics.
    """

    eps_c: float
    slope: float
    residual: float
    window: tuple
    free_slope: float
    free_eps_c: float


def fit_critical_drive(points, kerr: float, window) -> FitResult:
    """Estimate the critical drive from (eps0, occupation) pairs inside window."""
    lo, hi = float(window[0]), float(window[1])
    pts = [(float(e), float(na)) for e, na in points if lo <= float(e) <= hi]
    if len(pts) < 4:
        raise TooFewPoints(f"{len(pts)} points inside window [{lo}, {hi}], need >= 4")
    eps = np.array([p[0] for p in pts])
    na = np.array([p[1] for p in pts])
    eps_c = float(np.mean(eps - kerr * na))
    residual = float(np.sqrt(np.mean((na - (eps - eps_c) / kerr) ** 2)))
    free_slope, free_intercept = np.polyfit(eps, na, 1)
    return FitResult(
        eps_c=eps_c,
        slope=1.0 / kerr,
        residual=residual,
        window=(lo, hi),
        free_slope=float(free_slope),
        free_eps_c=float(-free_intercept / free_slope) if free_slope != 0 else float("nan"),
    )


@dataclass
class ConvergenceReport:
    cutoffs: list
    values: list
    rel_changes: list  # between consecutive cutoffs
    converged: bool  # last two values within 1% relative


def convergence_certify(protocol: DriveProtocol, extractor, cutoffs, rel_tol=0.01) -> ConvergenceReport:
    """Recompute a steady-state observable at increasing cutoffs.

    extractor maps a DensityMatrix to a float. Converged means the last two
    values agree to rel_tol (relative to the last). Every run is logged.
    """
    from .floquet import effective_spectrum, floquet_propagator, steady_state

    cutoffs = [int(d) for d in cutoffs]
    if len(cutoffs) < 3:
        raise ValueError("need at least 3 cutoffs")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly increasing")

    values = []
    for d in cutoffs:
        spec = effective_spectrum(
            floquet_propagator(protocol, FockSpace(d)), protocol.period
        )
        values.append(float(extractor(steady_state(spec))))
        log.info("convergence run at cutoff %d: %.8g", d, values[-1])

    rel = [
        abs(b - a) / max(abs(b), 1e-300) for a, b in zip(values, values[1:])
    ]
    return ConvergenceReport(
        cutoffs=cutoffs,
        values=values,
        rel_changes=rel,
        converged=bool(rel[-1] < rel_tol),
    )
