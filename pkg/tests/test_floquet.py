import numpy as np
import pytest
import scipy.linalg as sla

from floqkerr import (
    DegenerateSteady,
    DriveProtocol,
    FockSpace,
    NoRealEigenvalue,
    effective_spectrum,
    floquet_propagator,
    gaps,
    steady_state,
    thermal_density_matrix,
    trace_distance,
    vectorize,
)
from floqkerr.floquet import FloquetSpectrum, propagator_exponential
from floqkerr.liouville import build_liouvillian, devectorize, liouvillian_pair
from floqkerr.fock import hamiltonian


def test_unmodulated_drive_reduces_to_static_exponential(reference_params):
    protocol = DriveProtocol(eps1=0.8, eps2=0.8, **reference_params)
    space = FockSpace(8)
    u = floquet_propagator(protocol, space)
    l1, l2 = liouvillian_pair(protocol, space)
    assert np.max(np.abs(l1.matrix - l2.matrix)) == 0.0
    direct = sla.expm(l1.matrix * protocol.period)
    assert np.max(np.abs(u.matrix - direct)) < 1e-9


def test_propagator_two_level_decay():
    kappa, period = 0.5, 2.0
    protocol = DriveProtocol(0.0, 0.0, 0.0, 0.0, period, kappa)
    space = FockSpace(6)
    u = floquet_propagator(protocol, space)
    rho1 = np.zeros((6, 6), dtype=complex)
    rho1[1, 1] = 1.0
    out = devectorize(u.matrix @ vectorize(rho1), 6)
    assert out[1, 1].real == pytest.approx(np.exp(-1.0), abs=1e-9)
    assert out[0, 0].real == pytest.approx(1.0 - np.exp(-1.0), abs=1e-9)


def test_propagator_requires_dissipation(reference_params):
    params = dict(reference_params, kappa=0.0)
    protocol = DriveProtocol.symmetric(eps0=1.0, **params)
    with pytest.raises(ValueError):
        floquet_propagator(protocol, FockSpace(6))


def test_exponential_paths_agree(protocol_eps):
    space = FockSpace(8)
    l1, _ = liouvillian_pair(protocol_eps(1.0), space)
    mat = l1.matrix * 1.0
    pade = propagator_exponential(mat, "pade")
    eig = propagator_exponential(mat, "eig")
    assert np.max(np.abs(pade - eig)) < 1e-9


def test_spectral_radius_is_one(protocol_eps):
    space = FockSpace(20)
    u = floquet_propagator(protocol_eps(0.3), space)
    mu = np.linalg.eigvals(u.matrix)
    assert abs(float(np.abs(mu).max()) - 1.0) < 1e-8


def test_effective_spectrum_recovers_damped_oscillator():
    detuning, kappa, period = -1.0, 0.5, 2.0
    protocol = DriveProtocol(detuning, 0.0, 0.0, 0.0, period, kappa)
    spec = effective_spectrum(floquet_propagator(protocol, FockSpace(6)), period)
    n, m = np.meshgrid(np.arange(6), np.arange(6), indexing="ij")
    analytic = -0.5 * kappa * (n + m) + 1j * detuning * (n - m)
    unaliased = analytic[np.abs(detuning * (n - m)) * period < np.pi - 1e-9].ravel()
    found = spec.effective_eigenvalues.copy()
    for target in unaliased:
        j = int(np.argmin(np.abs(found - target)))
        assert abs(found[j] - target) < 1e-7
        found = np.delete(found, j)


def test_principal_log_arithmetic():
    # mu = 1 -> lambda = 0; mu = -e^{-1/2} with T=2 -> lambda = -1/4 + i pi/2
    space = FockSpace(2)
    mu = np.array([1.0, -np.exp(-0.5), 0.1, 0.05], dtype=complex)
    spec = FloquetSpectrum(
        space=space,
        period=2.0,
        propagator_eigenvalues=mu,
        effective_eigenvalues=(np.log(np.abs(mu)) + 1j * np.angle(mu)) / 2.0,
        eigenvectors=np.eye(4, dtype=complex),
        steady_index=0,
    )
    lam = spec.effective_eigenvalues
    assert lam[0] == 0.0
    assert lam[1] == pytest.approx(-0.25 + 1j * np.pi / 2.0, abs=1e-15)


def test_degenerate_steady_raises():
    from floqkerr.liouville import Superoperator

    space = FockSpace(2)
    with pytest.raises(DegenerateSteady):
        effective_spectrum(Superoperator(space, np.eye(4, dtype=complex)), 2.0)


def test_undriven_steady_state_is_vacuum(reference_params):
    protocol = DriveProtocol(eps1=0.0, eps2=0.0, **reference_params)
    space = FockSpace(10)
    spec = effective_spectrum(floquet_propagator(protocol, space), protocol.period)
    rho = steady_state(spec)
    vac = thermal_density_matrix(space, 0.0)
    assert trace_distance(rho, vac) < 1e-8


def test_steady_state_is_fixed_point(protocol_eps):
    protocol = protocol_eps(1.2)
    space = FockSpace(24)
    u = floquet_propagator(protocol, space)
    spec = effective_spectrum(u, protocol.period)
    rho = steady_state(spec)
    from floqkerr import DensityMatrix

    evolved = devectorize(u.matrix @ vectorize(rho.matrix), space.dim)
    evolved = (evolved + evolved.conj().T) / 2.0
    evolved /= np.trace(evolved).real
    assert trace_distance(rho, DensityMatrix(space, evolved)) < 1e-7


def test_gaps_static_damped_oscillator():
    detuning, kappa, period = -1.0, 0.5, 2.0
    protocol = DriveProtocol(detuning, 0.0, 0.0, 0.0, period, kappa)
    spec = effective_spectrum(floquet_propagator(protocol, FockSpace(6)), period)
    report = gaps(spec)
    assert report.gap_t == pytest.approx(0.25, abs=1e-7)
    assert report.gap_p == pytest.approx(0.5, abs=1e-7)
    assert not report.period_doubled
    assert report.gap_t <= report.gap_p + 1e-10


def test_gaps_period_doubling_in_two_cluster_phase(protocol_eps):
    protocol = protocol_eps(1.2)
    spec = effective_spectrum(
        floquet_propagator(protocol, FockSpace(24)), protocol.period
    )
    report = gaps(spec)
    assert report.period_doubled
    assert abs(report.dominant_phase - np.pi) < 1e-3
    assert report.gap_t <= report.gap_p + 1e-10


def test_gaps_single_cluster_phase_not_doubled(protocol_eps):
    protocol = protocol_eps(0.2)
    spec = effective_spectrum(
        floquet_propagator(protocol, FockSpace(24)), protocol.period
    )
    report = gaps(spec)
    assert not report.period_doubled


def test_gaps_no_real_candidate_raises():
    space = FockSpace(2)
    lam = np.array([0.0, -0.2 + 0.9j, -0.2 - 0.9j, -0.5 + 1.4j])
    spec = FloquetSpectrum(
        space=space,
        period=2.0,
        propagator_eigenvalues=np.exp(lam * 2.0),
        effective_eigenvalues=lam,
        eigenvectors=np.eye(4, dtype=complex),
        steady_index=0,
    )
    with pytest.raises(NoRealEigenvalue):
        gaps(spec)


def test_steady_state_not_positive_raises():
    from floqkerr import NotPositive
    from floqkerr.liouville import vectorize as vec

    space = FockSpace(2)
    bad = np.diag([1.1, -0.1]).astype(complex)
    vecs = np.column_stack([vec(bad), vec(np.eye(2, dtype=complex) / 2.0)])
    spec = FloquetSpectrum(
        space=space,
        period=2.0,
        propagator_eigenvalues=np.array([1.0, 0.3 + 0j]),
        effective_eigenvalues=np.array([0.0, np.log(0.3) / 2.0 + 0j]),
        eigenvectors=vecs,
        steady_index=0,
    )
    with pytest.raises(NotPositive):
        steady_state(spec)


def test_spectrum_conjugation_pairing(protocol_eps):
    protocol = protocol_eps(0.9)
    spec = effective_spectrum(
        floquet_propagator(protocol, FockSpace(12)), protocol.period
    )
    lam = spec.effective_eigenvalues
    finite = lam[np.isfinite(lam)]
    for val in finite:
        if abs(val.imag) > 1e-10 and abs(abs(val.imag) * protocol.period - np.pi) > 1e-6:
            assert np.min(np.abs(finite - np.conj(val))) < 1e-8
