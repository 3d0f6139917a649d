"""Truncated-Fock-space operators and states for a driven Kerr oscillator.

Conventions used everywhere in the package (stated once, here):

- Basis index m is the photon number, 0-based; |0> ... |D-1>.
- Matrix element M[i, j] = <i|M|j>: the row index is the bra.
- All matrices are dense complex arrays. The cutoffs this toolkit targets
  (D <= 64) make sparse storage pointless.
- Truncation artifacts at the top level (e.g. [a, a+] != 1 at m = D-1) are
  left in place; cutoff convergence is certified downstream, not masked here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotPositive, TailTooHeavy


@dataclass(frozen=True)
class FockSpace:
    """Bosonic Hilbert space truncated to the number states |0> ... |cutoff-1>."""

    cutoff: int

    def __post_init__(self):
        if not isinstance(self.cutoff, (int, np.integer)) or self.cutoff < 2:
            raise ValueError(f"cutoff must be an integer >= 2, got {self.cutoff!r}")

    @property
    def dim(self) -> int:
        return int(self.cutoff)


@dataclass(frozen=True)
class FockOperator:
    """A dense D x D operator tagged with the space it acts on."""

    space: FockSpace
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        d = self.space.dim
        if self.matrix.shape != (d, d):
            raise DimensionMismatch(
                f"operator {self.label!r} has shape {self.matrix.shape}, expected {(d, d)}"
            )

    def dag(self) -> "FockOperator":
        return FockOperator(self.space, self.matrix.conj().T.copy(), self.label + "+")


@dataclass(frozen=True)
class DriveProtocol:
    """Two-step squeezing drive: eps1 for the first half period, eps2 for the second.

    All rates and frequencies are dimensionless; the toolkit performs no unit
    conversion. kappa is the single-photon loss rate, detuning and kerr enter
    the Hamiltonian as -detuning*n + (kerr/2)*a+^2 a^2.
    """

    detuning: float
    kerr: float
    eps1: complex
    eps2: complex
    period: float
    kappa: float

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be non-negative, got {self.kappa}")

    @classmethod
    def symmetric(cls, detuning, kerr, eps0, period, kappa) -> "DriveProtocol":
        """Sign-flipped two-step drive: -eps0 then +eps0 with equal dwell times."""
        return cls(detuning, kerr, -eps0, +eps0, period, kappa)

    @property
    def eps0(self) -> complex:
        """Drive strength of the sign-flipped special case (eps2 = -eps1)."""
        if self.eps2 != -self.eps1:
            raise ValueError("protocol is not of the symmetric +/-eps0 form")
        return self.eps2

    @property
    def half_period(self) -> float:
        return self.period / 2.0


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state on a FockSpace.

    Construction does not validate (integrators build many of these);
    call validate() at module boundaries or in tests.
    """

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        d = self.space.dim
        if self.matrix.shape != (d, d):
            raise DimensionMismatch(
                f"density matrix has shape {self.matrix.shape}, expected {(d, d)}"
            )

    def validate(self, herm_tol=1e-10, trace_tol=1e-10, eig_floor=-1e-8) -> "DensityMatrix":
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T))
        if herm > herm_tol:
            raise NotPositive(f"not Hermitian: max |rho - rho+| = {herm:.3e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > trace_tol:
            raise NotPositive(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0).min())
        if lo < eig_floor:
            raise NotPositive(f"minimum eigenvalue {lo:.3e} below floor {eig_floor:.1e}")
        return self

    def expect(self, op: FockOperator) -> complex:
        self._check_space(op.space)
        return complex(np.trace(op.matrix @ self.matrix))

    def _check_space(self, other: FockSpace):
        if other.dim != self.space.dim:
            raise DimensionMismatch(
                f"cutoffs differ: {self.space.dim} vs {other.dim}"
            )


def annihilation(space: FockSpace) -> FockOperator:
    """Annihilation operator: <m-1|a|m> = sqrt(m), strictly upper-bidiagonal."""
    d = space.dim
    mat = np.diag(np.sqrt(np.arange(1.0, d)), k=1).astype(complex)
    mat.flags.writeable = False
    return FockOperator(space, mat, "a")


def number_operator(space: FockSpace) -> FockOperator:
    mat = np.diag(np.arange(space.dim, dtype=float)).astype(complex)
    mat.flags.writeable = False
    return FockOperator(space, mat, "n")


def identity(space: FockSpace) -> FockOperator:
    mat = np.eye(space.dim, dtype=complex)
    mat.flags.writeable = False
    return FockOperator(space, mat, "1")


def hamiltonian(space: FockSpace, detuning: float, kerr: float, eps: complex) -> FockOperator:
    """Kerr oscillator with a squeezing drive.

        H = -detuning * a+a + (kerr/2) * a+^2 a^2 + (eps/2) a+^2 + (eps*/2) a^2

    Assembled from an exactly real diagonal plus an explicit P + P+ pair, so
    H - H+ is identically zero entry by entry, not merely small.
    """
    d = space.dim
    m = np.arange(d, dtype=float)
    diag = -detuning * m + 0.5 * kerr * m * (m - 1.0)
    h = np.diag(diag).astype(complex)
    # <m+2| a+^2 |m> = sqrt((m+1)(m+2)), two below the main diagonal
    raise2 = np.diag(np.sqrt((m[:-2] + 1.0) * (m[:-2] + 2.0)), k=-2).astype(complex)
    pump = 0.5 * complex(eps) * raise2
    h += pump + pump.conj().T
    h.flags.writeable = False
    return FockOperator(space, h, "H")


def hamiltonian_pair(space: FockSpace, protocol: DriveProtocol):
    """The two half-period Hamiltonians of a two-step drive."""
    h1 = hamiltonian(space, protocol.detuning, protocol.kerr, protocol.eps1)
    h2 = hamiltonian(space, protocol.detuning, protocol.kerr, protocol.eps2)
    return h1, h2


def thermal_density_matrix(space: FockSpace, mean_occupation: float) -> DensityMatrix:
    """Diagonal geometric state with <n> = mean_occupation (before truncation).

    Raises TailTooHeavy when the truncated tail mass (q**D with
    q = n/(n+1)) is not below 1e-10; diagonal weights are renormalized to
    unit trace after truncation.
    """
    na = float(mean_occupation)
    if na < 0:
        raise ValueError(f"mean occupation must be >= 0, got {na}")
    d = space.dim
    if na == 0.0:
        mat = np.zeros((d, d), dtype=complex)
        mat[0, 0] = 1.0
        return DensityMatrix(space, mat)
    q = na / (na + 1.0)
    tail = q**d
    if tail >= 1e-10:
        raise TailTooHeavy(
            f"occupation {na} leaves tail mass {tail:.3e} >= 1e-10 above cutoff {d}"
        )
    weights = q ** np.arange(d, dtype=float)
    weights /= weights.sum()
    return DensityMatrix(space, np.diag(weights).astype(complex))


def coherent_density_matrix(space: FockSpace, alpha: complex) -> DensityMatrix:
    """Pure coherent state |alpha><alpha| truncated to the cutoff."""
    d = space.dim
    m = np.arange(d, dtype=float)
    # amplitudes via logs: |c_m| = exp(-|a|^2/2 + m ln|a| - lgamma(m+1)/2)
    from scipy.special import gammaln

    absa = abs(alpha)
    if absa == 0.0:
        vec = np.zeros(d, dtype=complex)
        vec[0] = 1.0
    else:
        logmag = -0.5 * absa**2 + m * np.log(absa) - 0.5 * gammaln(m + 1.0)
        phase = np.exp(1j * m * np.angle(complex(alpha)))
        vec = np.exp(logmag) * phase
    tail = 1.0 - float(np.sum(np.abs(vec) ** 2))
    if tail >= 1e-10:
        raise TailTooHeavy(
            f"coherent amplitude {alpha} leaves tail mass {tail:.3e} >= 1e-10"
        )
    vec = vec / np.linalg.norm(vec)
    return DensityMatrix(space, np.outer(vec, vec.conj()))


def trace_distance(rho_a: DensityMatrix, rho_b: DensityMatrix) -> float:
    """T(a, b) = (1/2) ||a - b||_1 for Hermitian arguments."""
    diff = rho_a.matrix - rho_b.matrix
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2.0))))
