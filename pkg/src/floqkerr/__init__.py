"""floqkerr: driven-dissipative Kerr oscillator toolkit.

Classical stroboscopic attractors, Floquet Liouvillian spectra, quasi-steady
states, Wigner phase-space diagnostics, and entropy/fluctuation observables
for a two-step squeezing drive with single-photon loss.
"""

__version__ = "0.1.0"

from .classical import (
    BifurcationDiagram,
    Classification,
    StroboscopicOrbit,
    bifurcation_sweep,
    classify,
    integrate_orbit,
    kernel_backend,
    lyapunov_exponent,
    mean_field_jacobian,
    mean_field_rhs,
)
from .errors import (
    ConfigInvalid,
    DegenerateSteady,
    DimensionMismatch,
    Diverged,
    EmptyOrbit,
    ExpFailure,
    NoRealEigenvalue,
    NotPositive,
    StepTooLarge,
    TailTooHeavy,
    ToolkitError,
    TooFewPoints,
)
from .floquet import (
    FloquetSpectrum,
    GapReport,
    effective_spectrum,
    floquet_propagator,
    gaps,
    steady_state,
)
from .fock import (
    DensityMatrix,
    DriveProtocol,
    FockOperator,
    FockSpace,
    annihilation,
    coherent_density_matrix,
    hamiltonian,
    identity,
    number_operator,
    thermal_density_matrix,
    trace_distance,
)
from .liouville import (
    Superoperator,
    apply,
    build_liouvillian,
    devectorize,
    integrate_master_equation,
    liouvillian_pair,
    vectorize,
)
from .observables import (
    ConvergenceReport,
    FitResult,
    SteadyObservables,
    convergence_certify,
    fit_critical_drive,
    steady_observables,
    thermal_entropy,
    von_neumann_entropy,
)
from .sweeps import QuantumPoint, quantum_point, run_quantum_sweep
from .wigner import (
    PhaseGrid,
    WignerMap,
    attractor_overlap,
    distribution_distance,
    negativity,
    wigner,
)
