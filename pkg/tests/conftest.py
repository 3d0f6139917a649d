import numpy as np
import pytest

from floqkerr import DriveProtocol, FockSpace


@pytest.fixture
def reference_params():
    """The reference parameter set used throughout: detuning -1, Kerr 0.2,
    loss 0.5, period 2."""
    return dict(detuning=-1.0, kerr=0.2, period=2.0, kappa=0.5)


@pytest.fixture
def protocol_eps(reference_params):
    def make(eps0, **overrides):
        params = dict(reference_params, **overrides)
        return DriveProtocol.symmetric(eps0=eps0, **params)

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_density(space: FockSpace, rng) -> np.ndarray:
    """Random full-rank density matrix (Wishart construction)."""
    d = space.dim
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def random_hermitian(space: FockSpace, rng) -> np.ndarray:
    d = space.dim
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (z + z.conj().T) / 2.0
