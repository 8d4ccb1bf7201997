"""Dense-matrix oracles shared by the test modules.

Everything here is built independently of the package kernels: operators are
assembled by explicit Kronecker products and propagation uses full
eigendecomposition.  Small systems only.
"""

import numpy as np
import pytest

# basis convention of the package: bit i of the index = z-projection of
# spin i (1 = up), spin 0 least significant.  Single-spin matrices are
# indexed [row, col] over (down, up).
I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=np.complex128)
SY = np.array([[0.0, 0.5j], [-0.5j, 0.0]], dtype=np.complex128)
SZ = np.array([[-0.5, 0.0], [0.0, 0.5]], dtype=np.complex128)
SPIN_MATS = {"x": SX, "y": SY, "z": SZ}


def site_operator(n_spins, site, mat):
    """Dense operator acting with mat on one spin, identity elsewhere."""
    out = np.array([[1.0]], dtype=np.complex128)
    for k in range(n_spins - 1, -1, -1):
        out = np.kron(out, mat if k == site else I2)
    return out


def dense_from_terms(n_spins, terms):
    """Dense Hamiltonian from a list of (i, j, axis, coefficient) terms."""
    dim = 1 << n_spins
    h = np.zeros((dim, dim), dtype=np.complex128)
    for (i, j, axis, c) in terms:
        mat = SPIN_MATS[axis]
        h += c * site_operator(n_spins, i, mat) @ site_operator(n_spins, j, mat)
    return h


def dense_evolve(h, psi, t):
    """exp(-i t H) psi by full eigendecomposition."""
    evals, evecs = np.linalg.eigh(h)
    return evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi))


def dense_imaginary(h, psi, beta):
    """Normalized exp(-beta H / 2) psi by full eigendecomposition."""
    evals, evecs = np.linalg.eigh(h)
    out = evecs @ (np.exp(-0.5 * beta * (evals - evals[0]))
                   * (evecs.conj().T @ psi))
    return out / np.linalg.norm(out)


def dense_ground_state(h):
    evals, evecs = np.linalg.eigh(h)
    return evals[0], evecs[:, 0]


def dense_rdm(psi, kept, n_spins):
    """Partial trace oracle by explicit index summation."""
    dim = 1 << n_spins
    kept = sorted(kept)
    traced = [s for s in range(n_spins) if s not in kept]
    dk = 1 << len(kept)
    rho = np.zeros((dk, dk), dtype=np.complex128)
    for m in range(dim):
        pm = sum(((m >> s) & 1) << t for t, s in enumerate(kept))
        em = tuple((m >> s) & 1 for s in traced)
        for mp in range(dim):
            pq = sum(((mp >> s) & 1) << t for t, s in enumerate(kept))
            eq = tuple((mp >> s) & 1 for s in traced)
            if em == eq:
                rho[pm, pq] += psi[m] * np.conj(psi[mp])
    return rho


def random_state(dim, rng):
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
