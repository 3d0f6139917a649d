import numpy as np
import pytest

from floqkerr import (
    DensityMatrix,
    DriveProtocol,
    FockSpace,
    TailTooHeavy,
    annihilation,
    coherent_density_matrix,
    hamiltonian,
    number_operator,
    thermal_density_matrix,
    trace_distance,
)


def test_annihilation_two_level():
    a = annihilation(FockSpace(2)).matrix
    assert np.array_equal(a, np.array([[0, 1], [0, 0]], dtype=complex))


def test_annihilation_entries():
    a = annihilation(FockSpace(3)).matrix
    assert a[1, 2] == pytest.approx(np.sqrt(2.0), abs=1e-15)
    # strictly upper-bidiagonal
    assert np.count_nonzero(a) == 2
    assert np.all(a[np.tril_indices(3)] == 0)


def test_truncated_commutator_structure():
    a = annihilation(FockSpace(10)).matrix
    comm = a @ a.conj().T - a.conj().T @ a
    expected = np.eye(10, dtype=complex)
    expected[9, 9] = -9.0
    assert np.max(np.abs(comm - expected)) < 1e-12


def test_commutator_diagonal_below_cutoff():
    d = 17
    a = annihilation(FockSpace(d)).matrix
    comm = a @ a.conj().T - a.conj().T @ a
    assert np.max(np.abs(np.diag(comm)[: d - 1] - 1.0)) < 1e-12


def test_number_operator_diagonal():
    n = number_operator(FockSpace(5)).matrix
    assert np.array_equal(np.diag(n).real, np.arange(5.0))


def test_hamiltonian_diagonal_no_drive():
    h = hamiltonian(FockSpace(4), detuning=-1.0, kerr=0.2, eps=0.0).matrix
    assert np.allclose(np.diag(h).real, [0.0, 1.0, 2.2, 3.6], atol=1e-14)
    assert np.max(np.abs(h - np.diag(np.diag(h)))) == 0.0


def test_hamiltonian_pump_matrix_element():
    h = hamiltonian(FockSpace(4), detuning=-1.0, kerr=0.2, eps=3.0).matrix
    assert h[2, 0] == pytest.approx(1.5 * np.sqrt(2.0), abs=1e-14)


def test_hamiltonian_exactly_hermitian(rng):
    for _ in range(25):
        detuning, kerr = rng.normal(size=2)
        eps = complex(*rng.normal(size=2))
        h = hamiltonian(FockSpace(30), detuning, kerr, eps).matrix
        assert np.max(np.abs(h - h.conj().T)) == 0.0


def test_thermal_zero_occupation_is_vacuum():
    rho = thermal_density_matrix(FockSpace(8), 0.0).matrix
    expected = np.zeros((8, 8))
    expected[0, 0] = 1.0
    assert np.array_equal(rho, expected)


def test_thermal_geometric_weights():
    rho = thermal_density_matrix(FockSpace(60), 1.0).matrix
    assert rho[0, 0].real == pytest.approx(0.5, abs=1e-12)
    assert rho[1, 1].real == pytest.approx(0.25, abs=1e-12)


def test_thermal_mean_occupation_matches():
    space = FockSpace(60)
    rho = thermal_density_matrix(space, 1.0)
    na = np.real(np.trace(number_operator(space).matrix @ rho.matrix))
    assert abs(na - 1.0) < 1e-10


def test_thermal_trace_and_structure():
    rho = thermal_density_matrix(FockSpace(50), 1.7).matrix
    assert abs(np.trace(rho).real - 1.0) < 1e-12
    assert np.all(np.diag(rho).real >= 0)
    off = rho - np.diag(np.diag(rho))
    assert np.max(np.abs(off)) == 0.0


def test_thermal_tail_guard():
    with pytest.raises(TailTooHeavy):
        thermal_density_matrix(FockSpace(10), 5.0)


def test_coherent_state_amplitude():
    space = FockSpace(30)
    alpha = 0.7 - 0.2j
    rho = coherent_density_matrix(space, alpha)
    a = annihilation(space)
    assert rho.expect(a) == pytest.approx(alpha, abs=1e-10)
    rho.validate()


def test_protocol_validation():
    with pytest.raises(ValueError):
        DriveProtocol(-1.0, 0.2, 0.0, 0.0, period=0.0, kappa=0.5)
    with pytest.raises(ValueError):
        DriveProtocol(-1.0, 0.2, 0.0, 0.0, period=2.0, kappa=-0.1)
    p = DriveProtocol.symmetric(-1.0, 0.2, 3.0, 2.0, 0.5)
    assert p.eps1 == -3.0 and p.eps2 == 3.0 and p.eps0 == 3.0


def test_density_matrix_validate_rejects_bad():
    space = FockSpace(4)
    bad = np.eye(4, dtype=complex) / 4.0
    bad[0, 1] = 0.5  # not Hermitian
    with pytest.raises(Exception):
        DensityMatrix(space, bad).validate()


def test_trace_distance_basics():
    space = FockSpace(40)
    vac = thermal_density_matrix(space, 0.0)
    th = thermal_density_matrix(space, 0.5)
    assert trace_distance(vac, vac) == pytest.approx(0.0, abs=1e-15)
    d = trace_distance(vac, th)
    assert 0.0 < d <= 1.0
