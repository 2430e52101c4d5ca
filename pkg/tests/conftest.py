import numpy as np
import pytest

from anderson_ent import BoundaryCondition, State


def dense_hamiltonian(h):
    """Dense oracle: explicit neighbor loop, independent of Hamiltonian.apply."""
    n = h.size
    m = np.zeros((n, n))
    for i in range(n):
        m[i, i] += h.potentials[i]
        for j in (i - 1, i + 1):
            if 0 <= j < n:
                m[i, j] += -h.hopping
            elif h.boundary is BoundaryCondition.PERIODIC:
                m[i, j % n] += -h.hopping
    return m


def dense_ground_pair(h):
    """Reference ground eigenpair with the package's sign convention."""
    evals, evecs = np.linalg.eigh(dense_hamiltonian(h))
    vec = evecs[:, 0]
    if vec[int(np.argmax(np.abs(vec)))] < 0:
        vec = -vec
    return evals[0], vec


def random_state(rng, n, complex_amps=True):
    amps = rng.standard_normal(n)
    if complex_amps:
        amps = amps + 1j * rng.standard_normal(n)
    return State(amps, normalize=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
