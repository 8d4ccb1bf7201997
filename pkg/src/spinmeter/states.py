"""Test-spin states and the three apparatus(+environment) ready states.

The ready states are: the symmetric zero-magnetization Dicke state of the
apparatus (with a thermal environment), a Gaussian-random state in the
apparatus zero-magnetization sector (with a thermal environment), and a
joint thermal pure state of apparatus and environment together.  Thermal
pure states are imaginary-time projections exp(-beta H'/2) of Gaussian
random vectors; the relevant H' is H_E alone for the product ready states
and H_A + H_AE + H_E for the joint one.
"""

from __future__ import annotations

import numpy as np

from .chebyshev import imaginary_evolve
from .core import normalize, tensor_product
from .hamiltonian import environment_hamiltonian, joint_block_hamiltonian

READY_KINDS = ("dicke_zero", "random_zero_sector", "joint_thermal")
# names used in experiment configs and CLI output
READY_ALIASES = {
    "dicke0": "dicke_zero",
    "randomR": "random_zero_sector",
    "jointBeta": "joint_thermal",
}


def canonical_ready_kind(kind):
    kind = READY_ALIASES.get(kind, kind)
    if kind not in READY_KINDS:
        known = sorted(READY_KINDS) + sorted(READY_ALIASES)
        raise ValueError(f"unknown ready state {kind!r}; expected one of {known}")
    return kind


def _as_generator(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def box_muller_complex(rng, size):
    """Complex Gaussian deviates via the Box-Muller transform.

    Each amplitude maps one uniform pair (u1, u2) to
    sqrt(-2 ln(1 - u1)) * exp(2 pi i u2), giving independent standard
    normals in the real and imaginary parts.
    """
    u = rng.random((size, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    return radius * (np.cos(angle) + 1j * np.sin(angle))


def system_state(a):
    """Test spin sqrt(a)|up> + sqrt(1-a)|down>, a in [0, 1]."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    return np.array([np.sqrt(1.0 - a), np.sqrt(a)], dtype=np.complex128)


def zero_sector_indices(n_apparatus):
    """Basis indices of the apparatus S^z_A = 0 sector, ascending."""
    if n_apparatus % 2 != 0:
        raise ValueError("zero-magnetization sector needs even N_A")
    m = np.arange(1 << n_apparatus, dtype=np.uint64)
    return np.nonzero(np.bitwise_count(m) == n_apparatus // 2)[0]


def dicke_zero(n_apparatus):
    """Maximal-multiplicity apparatus state with S_A^z = 0.

    Equal amplitude on every zero-magnetization basis state; built by
    enumeration so the amplitudes are exactly equal.
    """
    sector = zero_sector_indices(n_apparatus)
    psi = np.zeros(1 << n_apparatus, dtype=np.complex128)
    psi[sector] = 1.0 / np.sqrt(sector.size)
    return psi


def random_zero_sector(n_apparatus, seed):
    """Gaussian-random apparatus state restricted to the S_A^z = 0 sector."""
    rng = _as_generator(seed)
    sector = zero_sector_indices(n_apparatus)
    psi = np.zeros(1 << n_apparatus, dtype=np.complex128)
    psi[sector] = box_muller_complex(rng, sector.size)
    return normalize(psi)


def thermal_state(sub_hamiltonian, beta, seed):
    """Thermal pure state: normalized exp(-beta H/2) on a random vector."""
    rng = _as_generator(seed)
    raw = box_muller_complex(rng, sub_hamiltonian.dim)
    return imaginary_evolve(normalize(raw), sub_hamiltonian, beta)


class ReadyStatePrep:
    """Initial-state factory bound to one coupling realization.

    Precompiles the environment and apparatus+environment block
    sub-Hamiltonians once, then assembles |psi(a)>_S (x) ready state for any
    requested kind and seed.
    """

    def __init__(self, spec, layout, realization):
        self.spec = spec
        self.layout = layout
        self.realization = realization
        self._env_ham = None
        self._joint_ham = None

    @property
    def env_ham(self):
        if self._env_ham is None:
            self._env_ham = environment_hamiltonian(self.spec, self.layout,
                                                    self.realization)
        return self._env_ham

    @property
    def joint_ham(self):
        if self._joint_ham is None:
            self._joint_ham = joint_block_hamiltonian(self.spec, self.layout,
                                                      self.realization)
        return self._joint_ham

    def build(self, a, kind, beta, seed):
        """Full normalized initial state for one realization seed."""
        kind = canonical_ready_kind(kind)
        sys_part = system_state(a)
        n_a = self.layout.n_apparatus
        if kind == "joint_thermal":
            block = thermal_state(self.joint_ham, beta, seed)
            return tensor_product([sys_part, block])
        if kind == "dicke_zero":
            apparatus = dicke_zero(n_a)
        else:
            rng = _as_generator(seed)
            apparatus = random_zero_sector(n_a, rng)
            seed = rng  # environment draw continues the same stream
        parts = [sys_part, apparatus]
        if self.layout.n_environment:
            parts.append(thermal_state(self.env_ham, beta, seed))
        return tensor_product(parts)


def assemble_initial(a, kind, beta, seed, spec, layout, realization):
    """One-shot convenience wrapper around ReadyStatePrep.build."""
    return ReadyStatePrep(spec, layout, realization).build(a, kind, beta, seed)
