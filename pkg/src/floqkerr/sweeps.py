"""Quantum sweep orchestration shared by the CLI and the acceptance suite.

One sweep point = propagator -> effective spectrum -> steady state ->
observables + gaps. Soft failures (NotPositive, DegenerateSteady,
NoRealEigenvalue) are recorded on the point as a flag instead of aborting
the sweep; anything else propagates.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import DegenerateSteady, NoRealEigenvalue, NotPositive
from .floquet import GapReport, effective_spectrum, floquet_propagator, gaps, steady_state
from .fock import DensityMatrix, DriveProtocol, FockSpace
from .observables import SteadyObservables, steady_observables


@dataclass
class QuantumPoint:
    """Result of one (eps0, kerr, cutoff) spectral computation."""

    eps0: float
    kerr: float
    cutoff: int
    observables: SteadyObservables | None
    gap_report: GapReport | None
    flag: str = ""
    steady: DensityMatrix | None = None


def quantum_point(
    protocol: DriveProtocol,
    cutoff: int,
    method: str = "pade",
    keep_state: bool = False,
) -> QuantumPoint:
    """Compute observables and gaps for one protocol at one cutoff."""
    space = FockSpace(int(cutoff))
    eps0 = float(abs(protocol.eps2)) if protocol.eps2 == -protocol.eps1 else float("nan")
    flag = ""
    obs = None
    report = None
    rho = None
    try:
        spectrum = effective_spectrum(
            floquet_propagator(protocol, space, method=method), protocol.period
        )
    except DegenerateSteady:
        return QuantumPoint(eps0, protocol.kerr, space.dim, None, None, "DegenerateSteady")
    try:
        rho = steady_state(spectrum)
        obs = steady_observables(rho)
    except NotPositive:
        flag = "NotPositive"
    try:
        report = gaps(spectrum)
    except NoRealEigenvalue:
        flag = (flag + "+" if flag else "") + "NoRealEigenvalue"
    return QuantumPoint(
        eps0=eps0,
        kerr=protocol.kerr,
        cutoff=space.dim,
        observables=obs,
        gap_report=report,
        flag=flag,
        steady=rho if keep_state else None,
    )


def _point_from_params(params) -> QuantumPoint:
    detuning, kerr, eps0, period, kappa, cutoff, method = params
    protocol = DriveProtocol.symmetric(detuning, kerr, eps0, period, kappa)
    return quantum_point(protocol, cutoff, method=method)


def run_quantum_sweep(
    detuning: float,
    kerr_values,
    eps0_values,
    kappa: float,
    period: float,
    cutoffs,
    method: str = "pade",
    workers: int = 1,
    skip=None,
):
    """All (kerr, eps0, cutoff) combinations, in deterministic sweep order.

    skip is an optional set of (eps0, kerr, cutoff) keys (already-completed
    rows of a resumed sweep). With workers > 1 the points are dispatched to a
    process pool; results are always yielded in sweep order.
    """
    jobs = []
    for kerr in kerr_values:
        for eps0 in eps0_values:
            for cutoff in cutoffs:
                key = (float(eps0), float(kerr), int(cutoff))
                if skip and key in skip:
                    continue
                jobs.append((detuning, float(kerr), float(eps0), period, kappa, int(cutoff), method))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            return list(pool.map(_point_from_params, jobs))
    return [_point_from_params(j) for j in jobs]
