"""Self-contained oracle suite: every check compares an independently computed
reference (analytic spectra, closed-form decay laws, finite differences,
quadrature) against the production code path it guards. The CLI `verify`
command runs these and reports measured deltas; the acceptance tests gate on
them before any figure-level computation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import classical, liouville
from .classical import _kernels, mean_field_jacobian, mean_field_rhs
from .floquet import effective_spectrum, floquet_propagator, steady_state
from .fock import (
    DensityMatrix,
    DriveProtocol,
    FockSpace,
    annihilation,
    coherent_density_matrix,
    hamiltonian,
    thermal_density_matrix,
    trace_distance,
)
from .liouville import (
    apply,
    build_liouvillian,
    integrate_master_equation,
    rk4_step_matrix,
    vectorize,
)
from .wigner import PhaseGrid, attractor_overlap, wigner

REFERENCE_PARAMS = dict(detuning=-1.0, kerr=0.2, period=2.0, kappa=0.5)


@dataclass
class OracleResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: measured {self.measured:.3e} (threshold {self.threshold:.3e}) {self.detail}"


def _result(name, measured, threshold, detail="", larger_is_better=False):
    ok = measured >= threshold if larger_is_better else measured <= threshold
    return OracleResult(name, bool(ok), float(measured), float(threshold), detail)


def _damped_oscillator_liouvillian(cutoff=6, detuning=-1.0, kappa=0.5):
    space = FockSpace(cutoff)
    h = hamiltonian(space, detuning, 0.0, 0.0)
    return space, build_liouvillian(h, kappa)


def _analytic_damped_eigenvalues(cutoff, detuning, kappa):
    n, m = np.meshgrid(np.arange(cutoff), np.arange(cutoff), indexing="ij")
    return (-0.5 * kappa * (n + m) + 1j * detuning * (n - m)).ravel()


def _matched_distance(found, expected):
    """Greedy nearest-match distance between two eigenvalue multisets."""
    found = np.array(found, dtype=complex)
    worst = 0.0
    for lam in expected:
        j = int(np.argmin(np.abs(found - lam)))
        worst = max(worst, float(abs(found[j] - lam)))
        found = np.delete(found, j)
    return worst


def oracle_damped_spectrum_direct(liouvillian_builder=build_liouvillian) -> OracleResult:
    """Eigenvalues of the static damped-oscillator generator vs the analytic set."""
    detuning, kappa = -1.0, 0.5
    space = FockSpace(6)
    h = hamiltonian(space, detuning, 0.0, 0.0)
    lam = np.linalg.eigvals(liouvillian_builder(h, kappa).matrix)
    worst = _matched_distance(lam, _analytic_damped_eigenvalues(6, detuning, kappa))
    return _result("damped_spectrum_direct", worst, 1e-8)


def oracle_damped_spectrum_effective() -> OracleResult:
    """Same analytic spectrum recovered through the one-period propagator log.

    Only the principal-branch-unaliased subset (|detuning*(n-m)|*T < pi) is
    compared.
    """
    detuning, kappa, period = -1.0, 0.5, 2.0
    protocol = DriveProtocol(detuning, 0.0, 0.0, 0.0, period, kappa)
    space = FockSpace(6)
    spec = effective_spectrum(floquet_propagator(protocol, space), period)
    n, m = np.meshgrid(np.arange(6), np.arange(6), indexing="ij")
    unaliased = np.abs(detuning * (n - m)) * period < np.pi - 1e-9
    expected = (-0.5 * kappa * (n + m) + 1j * detuning * (n - m))[unaliased].ravel()
    worst = _matched_distance(spec.effective_eigenvalues, expected)
    return _result("damped_spectrum_effective", worst, 1e-7)


def oracle_amplitude_decay() -> OracleResult:
    """<a>(t) = alpha0 exp((i*detuning - kappa/2) t) for the undriven linear mode."""
    detuning, kappa, period = -1.0, 0.5, 2.0
    protocol = DriveProtocol(detuning, 0.0, 0.0, 0.0, period, kappa)
    space = FockSpace(20)
    alpha0 = 0.6
    rho0 = coherent_density_matrix(space, alpha0)
    t_final = 4.0
    rho = integrate_master_equation(protocol, rho0, t_final)
    a = annihilation(space)
    measured = rho.expect(a)
    expected = alpha0 * np.exp((1j * detuning - kappa / 2.0) * t_final)
    return _result("amplitude_decay_rk4", abs(measured - expected), 1e-6)


def oracle_two_level_decay() -> OracleResult:
    """Propagator applied to |1><1| (H = 0): weights e^{-kT} and 1 - e^{-kT}."""
    kappa, period = 0.5, 2.0
    protocol = DriveProtocol(0.0, 0.0, 0.0, 0.0, period, kappa)
    space = FockSpace(6)
    u = floquet_propagator(protocol, space)
    rho1 = np.zeros((6, 6), dtype=complex)
    rho1[1, 1] = 1.0
    out = liouville.devectorize(u.matrix @ vectorize(rho1), 6)
    expected = np.zeros((6, 6), dtype=complex)
    expected[1, 1] = np.exp(-kappa * period)
    expected[0, 0] = 1.0 - np.exp(-kappa * period)
    return _result("propagator_two_level_decay", float(np.max(np.abs(out - expected))), 1e-9)


def oracle_spectral_radius() -> OracleResult:
    """Trace-preserving positive map: spectral radius of U(T) equals 1."""
    protocol = DriveProtocol.symmetric(eps0=0.3, **REFERENCE_PARAMS)
    space = FockSpace(30)
    u = floquet_propagator(protocol, space)
    radius = float(np.abs(np.linalg.eigvals(u.matrix)).max())
    return _result("propagator_spectral_radius", abs(radius - 1.0), 1e-8)


def oracle_steady_state_cross_check() -> OracleResult:
    """Spectral fixed point vs 200-period RK4 integration from vacuum (dual route)."""
    protocol = DriveProtocol.symmetric(eps0=1.0, **REFERENCE_PARAMS)
    space = FockSpace(30)
    spec = effective_spectrum(floquet_propagator(protocol, space), protocol.period)
    rho_spectral = steady_state(spec)
    vac = np.zeros((30, 30), dtype=complex)
    vac[0, 0] = 1.0
    rho_rk4 = integrate_master_equation(
        protocol, DensityMatrix(space, vac), 200 * protocol.period
    )
    return _result(
        "steady_state_cross_check", trace_distance(rho_spectral, rho_rk4), 1e-4
    )


def oracle_wigner_vacuum() -> OracleResult:
    """Vacuum Wigner equals (2/pi) exp(-2|alpha|^2) pointwise."""
    space = FockSpace(12)
    rho = thermal_density_matrix(space, 0.0)
    grid = PhaseGrid.square(3.0, 41)
    wmap = wigner(rho, grid)
    x, p = grid.mesh()
    expected = (2.0 / np.pi) * np.exp(-2.0 * (x**2 + p**2))
    return _result("wigner_vacuum_pointwise", float(np.max(np.abs(wmap.values - expected))), 1e-8)


def oracle_wigner_disk_mass() -> OracleResult:
    """Positive-mass fraction of the vacuum in a disk: 1 - exp(-2 r^2)."""
    space = FockSpace(12)
    rho = thermal_density_matrix(space, 0.0)
    grid = PhaseGrid.square(4.0, 201)
    wmap = wigner(rho, grid)
    r = 0.8
    measured = attractor_overlap(wmap, np.array([0.0 + 0.0j]), r)
    expected = 1.0 - np.exp(-2.0 * r**2)
    return _result("wigner_vacuum_disk_mass", abs(measured - expected), 0.01)


def oracle_rk4_order() -> OracleResult:
    """Halving dt cuts the one-period flow-map error ~16x (4th order).

    Errors are measured against a reference at 16x finer steps on a smooth
    (regular-phase) orbit; the measured factor must land in [12, 20].
    """
    p = DriveProtocol.symmetric(eps0=1.2, **REFERENCE_PARAMS)
    alpha0 = np.array([0.9 + 0.4j])
    args = (p.eps1, p.eps2, p.detuning, p.kerr, p.kappa, p.period)

    def one_period(steps):
        _, _, _, final = _kernels.evolve_batch(
            alpha0, *args, steps, 0, 1, with_tangent=False
        )
        return final[0]

    ref = one_period(160)
    err_coarse = abs(one_period(10) - ref)
    err_fine = abs(one_period(20) - ref)
    factor = err_coarse / err_fine
    ok = 12.0 <= factor <= 20.0
    return OracleResult(
        "rk4_order_factor",
        bool(ok),
        float(factor),
        16.0,
        f"(errors {err_coarse:.3e} -> {err_fine:.3e}; acceptance band [12, 20])",
    )


def oracle_jacobian_finite_difference() -> OracleResult:
    """Analytic 2x2 Jacobian vs central differences of the flow at random points."""
    rng = np.random.default_rng(2024)
    p = DriveProtocol.symmetric(eps0=3.0, **REFERENCE_PARAMS)
    h = 1e-6
    worst = 0.0
    for _ in range(20):
        alpha = complex(*rng.normal(0, 2, 2))
        eps = complex(*rng.normal(0, 2, 2))
        jac = mean_field_jacobian(alpha, eps, p)
        fd = np.empty((2, 2))
        for col, dz in enumerate((h, 1j * h)):
            fplus = mean_field_rhs(alpha + dz, eps, p)
            fminus = mean_field_rhs(alpha - dz, eps, p)
            fd[0, col] = (fplus.real - fminus.real) / (2 * h)
            fd[1, col] = (fplus.imag - fminus.imag) / (2 * h)
        scale = max(1.0, float(np.abs(jac).max()))
        worst = max(worst, float(np.abs(jac - fd).max()) / scale)
    return _result("jacobian_finite_difference", worst, 1e-5)


def oracle_linear_lyapunov() -> OracleResult:
    """Undriven linear flow contracts at exactly -kappa/2."""
    p = DriveProtocol(-1.0, 0.0, 0.0, 0.0, 2.0, 0.5)
    lam = classical.lyapunov_exponent(p, 1.0 + 0.0j, periods=200, transient=5)
    return _result("linear_flow_lyapunov", abs(lam + p.kappa / 2.0), 1e-3)


def oracle_generator_trace_preservation() -> OracleResult:
    """w . L = 0 for the vectorized-identity left row (both half-period generators)."""
    protocol = DriveProtocol.symmetric(eps0=3.0, **REFERENCE_PARAMS)
    space = FockSpace(12)
    l1, l2 = liouville.liouvillian_pair(protocol, space)
    w = vectorize(np.eye(12, dtype=complex)).conj()
    worst = max(
        float(np.abs(w @ l1.matrix).max()), float(np.abs(w @ l2.matrix).max())
    )
    return _result("generator_trace_preservation", worst, 1e-10)


def oracle_hermiticity_preservation() -> OracleResult:
    """L rho stays Hermitian for Hermitian rho (20 random trials)."""
    rng = np.random.default_rng(7)
    protocol = DriveProtocol.symmetric(eps0=3.0, **REFERENCE_PARAMS)
    space = FockSpace(8)
    l1, _ = liouville.liouvillian_pair(protocol, space)
    worst = 0.0
    for _ in range(20):
        z = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        rho = z + z.conj().T
        out = apply(l1, rho)
        worst = max(worst, float(np.max(np.abs(out - out.conj().T))))
    return _result("hermiticity_preservation", worst, 1e-10)


def oracle_thermal_occupation() -> OracleResult:
    """Tr(rho n) of the truncated geometric state vs the requested occupation."""
    space = FockSpace(50)
    rho = thermal_density_matrix(space, 1.0)
    measured = float(np.real(np.trace(np.diag(np.arange(50.0)) @ rho.matrix)))
    return _result("thermal_mean_occupation", abs(measured - 1.0), 1e-10)


def oracle_truncated_commutator() -> OracleResult:
    """a a+ - a+ a at cutoff 10: identity except the -9 truncation corner."""
    space = FockSpace(10)
    a = annihilation(space).matrix
    comm = a @ a.conj().T - a.conj().T @ a
    expected = np.eye(10, dtype=complex)
    expected[9, 9] = -9.0
    return _result("truncated_commutator", float(np.max(np.abs(comm - expected))), 1e-12)


def oracle_rk4_matrix_equivalence() -> OracleResult:
    """The per-step update matrix reproduces an explicitly staged RK4 step."""
    rng = np.random.default_rng(11)
    protocol = DriveProtocol.symmetric(eps0=3.0, **REFERENCE_PARAMS)
    space = FockSpace(8)
    l1, _ = liouville.liouvillian_pair(protocol, space)
    dt = 0.01
    step = rk4_step_matrix(l1, dt)
    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    k1 = l1.matrix @ v
    k2 = l1.matrix @ (v + 0.5 * dt * k1)
    k3 = l1.matrix @ (v + 0.5 * dt * k2)
    k4 = l1.matrix @ (v + dt * k3)
    staged = v + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    rel = float(np.max(np.abs(step @ v - staged)) / np.max(np.abs(staged)))
    return _result("rk4_step_matrix_equivalence", rel, 1e-12)


FAST_ORACLES = [
    oracle_truncated_commutator,
    oracle_thermal_occupation,
    oracle_generator_trace_preservation,
    oracle_hermiticity_preservation,
    oracle_damped_spectrum_direct,
    oracle_damped_spectrum_effective,
    oracle_two_level_decay,
    oracle_amplitude_decay,
    oracle_rk4_matrix_equivalence,
    oracle_wigner_vacuum,
    oracle_wigner_disk_mass,
    oracle_jacobian_finite_difference,
    oracle_rk4_order,
    oracle_linear_lyapunov,
]

SLOW_ORACLES = [
    oracle_spectral_radius,
    oracle_steady_state_cross_check,
]


def run_all(include_slow: bool = True) -> list:
    """Run the oracle suite; failures are report content, not exceptions."""
    checks = list(FAST_ORACLES) + (list(SLOW_ORACLES) if include_slow else [])
    return [check() for check in checks]
