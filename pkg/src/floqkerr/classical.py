"""Mean-field dynamics: stroboscopic orbits, attractor classification, Lyapunov
exponents and bifurcation sweeps.

The flow integrated here is

    d(alpha)/dt = (-kappa/2 + i*detuning - i*kerr*|alpha|^2) alpha - i*eps(t)*conj(alpha)

with the two-step drive of DriveProtocol switching exactly at half-period
boundaries. The Poincare section is the stroboscopic map at t = k*T, phase 0
(start of the eps1 half-step).

The hot RK4/tangent loops live in a compiled Cython kernel when available,
with a NumPy fallback selected at import; see kernel_backend().
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import Diverged
from .fock import DriveProtocol

if os.environ.get("FLOQKERR_FORCE_PYTHON_KERNEL"):
    from . import _orbit_py as _kernels

    _BACKEND = "python"
else:
    try:
        from . import _orbit_cy as _kernels  # type: ignore[attr-defined]

        _BACKEND = "compiled"
    except ImportError:
        from . import _orbit_py as _kernels

        _BACKEND = "python"


def kernel_backend() -> str:
    """Which orbit kernel was selected at import: 'compiled' or 'python'."""
    return _BACKEND


DIVERGENCE_RADIUS = 1.0e3
DEFAULT_TRANSIENT = 500
DEFAULT_RECORDED = 2000
DEFAULT_STEPS_PER_HALF = 100
MAX_SCAN_PERIOD = 8
MIN_CLASSIFY_SAMPLES = 200


@dataclass(frozen=True)
class Classification:
    """Attractor taxonomy of a stroboscopic orbit."""

    kind: str  # fixed_point | periodic | chaotic | unclassified | diverged
    period: int = 0

    @property
    def label(self) -> str:
        if self.kind == "fixed_point":
            return "FixedPoint"
        if self.kind == "periodic":
            return "PeriodTwo" if self.period == 2 else f"PeriodK({self.period})"
        return {"chaotic": "Chaotic", "unclassified": "Unclassified", "diverged": "Diverged"}[
            self.kind
        ]

    @classmethod
    def fixed_point(cls):
        return cls("fixed_point", 1)

    @classmethod
    def periodic(cls, k: int):
        return cls("periodic", int(k))

    @classmethod
    def chaotic(cls):
        return cls("chaotic")

    @classmethod
    def unclassified(cls):
        return cls("unclassified")

    @classmethod
    def diverged(cls):
        return cls("diverged")

    def complexity(self) -> tuple:
        """Sort key: diverged < unclassified < fixed point < k-cycles < chaos."""
        order = {"diverged": 0, "unclassified": 1, "fixed_point": 2, "periodic": 3, "chaotic": 4}
        return (order[self.kind], self.period)


@dataclass
class StroboscopicOrbit:
    """Post-transient stroboscopic samples of one trajectory plus metadata."""

    protocol: DriveProtocol
    alpha0: complex
    transient_periods: int
    samples: np.ndarray
    classification: Classification
    lyapunov: float | None = None


def mean_field_rhs(alpha: complex, eps: complex, protocol: DriveProtocol) -> complex:
    """Right-hand side of the mean-field flow at drive amplitude eps."""
    return (
        -0.5 * protocol.kappa + 1j * protocol.detuning - 1j * protocol.kerr * abs(alpha) ** 2
    ) * alpha - 1j * eps * np.conj(alpha)


def mean_field_jacobian(alpha: complex, eps: complex, protocol: DriveProtocol) -> np.ndarray:
    """Real 2x2 Jacobian of the flow at alpha = (x, p).

    The conj(alpha) drive term makes the flow non-holomorphic, so the tangent
    dynamics lives in real coordinates; its trace is identically -kappa.
    """
    x, p = float(np.real(alpha)), float(np.imag(alpha))
    er, ei = float(np.real(eps)), float(np.imag(eps))
    u, det, kap = protocol.kerr, protocol.detuning, protocol.kappa
    return np.array(
        [
            [-0.5 * kap + 2.0 * u * x * p + ei, -det + u * (x * x + 3.0 * p * p) - er],
            [det - u * (3.0 * x * x + p * p) - er, -0.5 * kap - 2.0 * u * x * p - ei],
        ]
    )


def classify(
    samples,
    delta_cluster: float | None = None,
    lyapunov: float | None = None,
    period: float | None = None,
    lyap_tol: float | None = None,
    max_scan_period: int = MAX_SCAN_PERIOD,
) -> Classification:
    """Greedy clustering of stroboscopic samples into the attractor taxonomy.

    One cluster (all samples within delta_cluster of their mean) is a fixed
    point; up to max_scan_period clusters visited cyclically is a k-cycle;
    anything else is chaotic only if the supplied Lyapunov exponent exceeds
    lyap_tol (default 1e-3/T), and unclassified otherwise.
    """
    s = np.asarray(samples, dtype=complex).ravel()
    if s.size < MIN_CLASSIFY_SAMPLES:
        raise ValueError(
            f"classification needs >= {MIN_CLASSIFY_SAMPLES} samples, got {s.size}"
        )
    if not np.all(np.isfinite(s)):
        return Classification.diverged()
    if delta_cluster is None:
        delta_cluster = 1e-4 * max(1.0, float(np.abs(s).max()))
    if lyap_tol is None:
        lyap_tol = 1e-3 / period if period else 1e-3

    if np.abs(s - s.mean()).max() <= delta_cluster:
        return Classification.fixed_point()

    centers: list[complex] = []
    labels = np.empty(s.size, dtype=int)
    overflow = False
    for idx, z in enumerate(s):
        if centers:
            dist = np.abs(np.asarray(centers) - z)
            j = int(np.argmin(dist))
            if dist[j] <= delta_cluster:
                labels[idx] = j
                continue
        if len(centers) > max_scan_period:
            overflow = True
            break
        labels[idx] = len(centers)
        centers.append(z)

    if not overflow and 2 <= len(centers) <= max_scan_period:
        k = len(centers)
        if np.all(labels[k:] == labels[:-k]):
            return Classification.periodic(k)

    if lyapunov is not None and np.isfinite(lyapunov) and lyapunov > lyap_tol:
        return Classification.chaotic()
    return Classification.unclassified()


def integrate_orbit(
    protocol: DriveProtocol,
    alpha0: complex,
    periods: int = DEFAULT_RECORDED,
    steps_per_half: int = DEFAULT_STEPS_PER_HALF,
    transient: int = DEFAULT_TRANSIENT,
    with_lyapunov: bool = True,
    delta_cluster: float | None = None,
) -> StroboscopicOrbit:
    """Integrate one trajectory and classify its post-transient attractor.

    Divergence is reported as the Diverged classification, never raised.
    Fewer than 200 recorded periods leaves the orbit Unclassified.
    """
    if steps_per_half < 50:
        raise ValueError(f"need >= 50 steps per half period, got {steps_per_half}")
    samples, lyap, diverged, _ = _kernels.evolve_batch(
        np.array([alpha0], dtype=complex),
        protocol.eps1,
        protocol.eps2,
        protocol.detuning,
        protocol.kerr,
        protocol.kappa,
        protocol.period,
        steps_per_half,
        transient,
        periods,
        with_tangent=with_lyapunov,
    )
    lyapunov = float(lyap[0]) if with_lyapunov and np.isfinite(lyap[0]) else None
    if bool(diverged[0]):
        cls = Classification.diverged()
    elif samples.shape[1] >= MIN_CLASSIFY_SAMPLES:
        cls = classify(
            samples[0],
            delta_cluster=delta_cluster,
            lyapunov=lyapunov,
            period=protocol.period,
        )
    else:
        cls = Classification.unclassified()
    return StroboscopicOrbit(
        protocol=protocol,
        alpha0=complex(alpha0),
        transient_periods=transient,
        samples=samples[0],
        classification=cls,
        lyapunov=lyapunov,
    )


def lyapunov_exponent(
    protocol: DriveProtocol,
    alpha0: complex,
    periods: int = 700,
    steps_per_half: int = DEFAULT_STEPS_PER_HALF,
    transient: int = DEFAULT_TRANSIENT,
) -> float:
    """Largest Lyapunov exponent, averaged over `periods` post-transient periods.

    Tangent propagation of the real 2x2 Jacobian runs alongside the orbit with
    Gram-Schmidt renormalization each period; raises Diverged if the orbit
    leaves the guard disk.
    """
    _, lyap, diverged, _ = _kernels.evolve_batch(
        np.array([alpha0], dtype=complex),
        protocol.eps1,
        protocol.eps2,
        protocol.detuning,
        protocol.kerr,
        protocol.kappa,
        protocol.period,
        steps_per_half,
        transient,
        periods,
        with_tangent=True,
    )
    if bool(diverged[0]) or not np.isfinite(lyap[0]):
        raise Diverged(f"orbit from {alpha0} left the |alpha| <= {DIVERGENCE_RADIUS:g} disk")
    return float(lyap[0])


@dataclass
class BifurcationDiagram:
    """Stroboscopic samples, majority classification and Lyapunov exponent per drive value."""

    eps0_values: np.ndarray
    samples: list  # per value: union of post-transient samples over initial conditions
    classifications: list
    lyapunovs: list
    orbit_classifications: list = field(default_factory=list)  # per value, per IC

    def rows(self):
        """Long-format rows (eps0, re_alpha, classification, lyapunov)."""
        for eps0, samp, cls, lyap in zip(
            self.eps0_values, self.samples, self.classifications, self.lyapunovs
        ):
            for z in samp:
                yield (float(eps0), float(np.real(z)), cls.label, lyap)


def _aggregate(classes: list) -> Classification:
    """Majority vote over initial conditions; ties resolved toward complexity."""
    live = [c for c in classes if c.kind != "diverged"]
    if not live:
        return Classification.diverged()
    counts: dict = {}
    for c in live:
        counts[c] = counts.get(c, 0) + 1
    best = max(counts.items(), key=lambda kv: (kv[1], kv[0].complexity()))
    return best[0]


def initial_conditions_disk(eps0: float, kerr: float, n: int, rng) -> np.ndarray:
    """Uniform draws from the disk |alpha| <= sqrt((eps0 + 1)/kerr)."""
    radius = np.sqrt((eps0 + 1.0) / kerr)
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return r * np.exp(1j * theta)


def bifurcation_sweep(
    protocol_template: DriveProtocol,
    eps0_values,
    n_initial_conditions: int = 16,
    seed: int = 0,
    periods: int = DEFAULT_RECORDED,
    steps_per_half: int = DEFAULT_STEPS_PER_HALF,
    transient: int = DEFAULT_TRANSIENT,
) -> BifurcationDiagram:
    """Stroboscopic attractor scan over drive strengths.

    For each eps0, n_initial_conditions seeded random starts are integrated in
    one batched kernel call; per-value samples are the union over starts, so
    every attractor found is kept. The per-value classification is the
    majority vote over starts (ties toward the more complex attractor), with
    the Lyapunov exponent reported as the largest among orbits of that class.
    """
    eps0_values = np.asarray(eps0_values, dtype=float)
    if eps0_values.ndim != 1 or eps0_values.size == 0:
        raise ValueError("eps0_values must be a non-empty 1-d sequence")
    if np.any(np.diff(eps0_values) <= 0):
        raise ValueError("eps0_values must be strictly increasing")
    if steps_per_half < 50:
        raise ValueError(f"need >= 50 steps per half period, got {steps_per_half}")

    rng = np.random.default_rng(seed)
    n_ic = int(n_initial_conditions)
    alpha0 = np.concatenate(
        [initial_conditions_disk(e, protocol_template.kerr, n_ic, rng) for e in eps0_values]
    )
    eps_rep = np.repeat(eps0_values, n_ic)
    samples, lyap, diverged, _ = _kernels.evolve_batch(
        alpha0,
        -eps_rep + 0j,
        +eps_rep + 0j,
        protocol_template.detuning,
        protocol_template.kerr,
        protocol_template.kappa,
        protocol_template.period,
        steps_per_half,
        transient,
        periods,
        with_tangent=True,
    )

    per_value_samples = []
    per_value_class = []
    per_value_lyap = []
    per_orbit_class = []
    for i, eps0 in enumerate(eps0_values):
        block = slice(i * n_ic, (i + 1) * n_ic)
        orbit_classes = []
        union = []
        for j in range(*block.indices(alpha0.size)):
            if diverged[j]:
                orbit_classes.append(Classification.diverged())
                continue
            lj = float(lyap[j]) if np.isfinite(lyap[j]) else None
            orbit_classes.append(
                classify(samples[j], lyapunov=lj, period=protocol_template.period)
                if samples.shape[1] >= MIN_CLASSIFY_SAMPLES
                else Classification.unclassified()
            )
            union.append(samples[j])
        agg = _aggregate(orbit_classes)
        matching = [
            float(lyap[j])
            for j, c in zip(range(*block.indices(alpha0.size)), orbit_classes)
            if c == agg and np.isfinite(lyap[j])
        ]
        per_value_samples.append(
            np.concatenate(union) if union else np.empty(0, dtype=complex)
        )
        per_value_class.append(agg)
        per_value_lyap.append(max(matching) if matching else float("nan"))
        per_orbit_class.append(orbit_classes)

    return BifurcationDiagram(
        eps0_values=eps0_values,
        samples=per_value_samples,
        classifications=per_value_class,
        lyapunovs=per_value_lyap,
        orbit_classifications=per_orbit_class,
    )
