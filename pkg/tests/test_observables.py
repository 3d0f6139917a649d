import numpy as np
import pytest

from floqkerr import (
    DensityMatrix,
    FockSpace,
    NotPositive,
    TooFewPoints,
    convergence_certify,
    fit_critical_drive,
    steady_observables,
    thermal_density_matrix,
    thermal_entropy,
    von_neumann_entropy,
)
from floqkerr.fock import DriveProtocol

from conftest import random_density


def test_vacuum_observables():
    obs = steady_observables(thermal_density_matrix(FockSpace(8), 0.0))
    assert obs.occupation == 0.0
    assert obs.number_variance == 0.0
    assert obs.entropy == pytest.approx(0.0, abs=1e-12)
    assert obs.thermal_baseline == 0.0


def test_thermal_entropy_formula():
    assert thermal_entropy(0.0) == 0.0
    assert thermal_entropy(1.0) == pytest.approx(2.0 * np.log(2.0), abs=1e-14)


def test_thermal_state_entropy_matches_baseline():
    obs = steady_observables(thermal_density_matrix(FockSpace(60), 1.0))
    assert obs.entropy == pytest.approx(2.0 * np.log(2.0), abs=1e-10)
    assert obs.entropy_ratio == pytest.approx(1.0, abs=1e-10)


def test_entropy_ratio_one_for_thermal_family():
    space = FockSpace(80)
    for na in (0.3, 0.9, 1.5, 2.0):
        obs = steady_observables(thermal_density_matrix(space, na))
        assert abs(obs.entropy_ratio - 1.0) < 1e-10


def test_two_level_mixture():
    space = FockSpace(6)
    rho = np.zeros((6, 6), dtype=complex)
    rho[0, 0] = rho[1, 1] = 0.5
    obs = steady_observables(DensityMatrix(space, rho))
    assert obs.occupation == pytest.approx(0.5)
    assert obs.number_variance == pytest.approx(0.25)
    assert obs.entropy == pytest.approx(np.log(2.0), abs=1e-12)
    assert obs.fano == pytest.approx(0.5)


def test_fock_state_variance_zero():
    space = FockSpace(10)
    for m in (0, 3, 7):
        rho = np.zeros((10, 10), dtype=complex)
        rho[m, m] = 1.0
        obs = steady_observables(DensityMatrix(space, rho))
        assert obs.number_variance == pytest.approx(0.0, abs=1e-12)


def test_entropy_unitary_invariance(rng):
    space = FockSpace(10)
    rho = random_density(space, rng)
    s0 = von_neumann_entropy(DensityMatrix(space, rho))
    for _ in range(5):
        z = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        q, _ = np.linalg.qr(z)
        s1 = von_neumann_entropy(DensityMatrix(space, q @ rho @ q.conj().T))
        assert abs(s1 - s0) < 1e-9


def test_entropy_bounded_by_log_dim(rng):
    space = FockSpace(12)
    for _ in range(10):
        rho = DensityMatrix(space, random_density(space, rng))
        assert von_neumann_entropy(rho) <= np.log(12) + 1e-8


def test_entropy_rejects_strong_negativity():
    space = FockSpace(4)
    mat = np.diag([0.6, 0.5, -0.1, 0.0]).astype(complex)
    with pytest.raises(NotPositive):
        von_neumann_entropy(DensityMatrix(space, mat))


def test_fit_exact_recovery():
    eps = np.linspace(2.2, 3.0, 9)
    na = (eps - 0.27) / 0.2
    res = fit_critical_drive(zip(eps, na), kerr=0.2, window=(2.2, 3.0))
    assert res.eps_c == pytest.approx(0.27, abs=1e-12)
    assert res.residual == pytest.approx(0.0, abs=1e-12)
    assert res.slope == pytest.approx(5.0)
    assert res.free_slope == pytest.approx(5.0, abs=1e-9)
    assert res.free_eps_c == pytest.approx(0.27, abs=1e-9)


def test_fit_with_noise_recovers_within_tolerance(rng):
    eps = np.linspace(2.2, 3.0, 17)
    for _ in range(20):
        na = (eps - 0.27) / 0.2 + rng.normal(0, 0.01, eps.size)
        res = fit_critical_drive(zip(eps, na), kerr=0.2, window=(2.2, 3.0))
        assert abs(res.eps_c - 0.27) < 0.02


def test_fit_window_filtering_and_minimum():
    eps = np.linspace(1.0, 3.0, 21)
    na = (eps - 0.27) / 0.2
    res = fit_critical_drive(zip(eps, na), kerr=0.2, window=(2.2, 3.0))
    assert res.window == (2.2, 3.0)
    with pytest.raises(TooFewPoints):
        fit_critical_drive(zip(eps[:3], na[:3]), kerr=0.2, window=(0.0, 3.0))


def test_convergence_certify_undriven(reference_params):
    protocol = DriveProtocol(eps1=0.0, eps2=0.0, **reference_params)
    report = convergence_certify(
        protocol, lambda rho: steady_observables(rho).occupation, [4, 6, 8]
    )
    assert report.converged
    assert all(abs(v) < 1e-8 for v in report.values)


def test_convergence_certify_validates_cutoffs(reference_params):
    protocol = DriveProtocol(eps1=0.0, eps2=0.0, **reference_params)
    with pytest.raises(ValueError):
        convergence_certify(protocol, lambda rho: 0.0, [4, 6])
    with pytest.raises(ValueError):
        convergence_certify(protocol, lambda rho: 0.0, [6, 6, 8])
