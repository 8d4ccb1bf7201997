"""Basis conventions, state-vector helpers, and elementary spin-operator kernels.

The composite system is a single test spin S, an apparatus of N_A spins, and
an environment of N_E spins, all spin-1/2.  Basis states are integers: bit i
of the index is the z-projection of spin i (1 = up), with spin 0 (the test
spin) in the least significant bit.  Spin operators are S^a = sigma^a / 2 and
hbar = k_B = 1 throughout.

Index layout: spin 0 = S, spins 1..N_A = apparatus chain, spins
N_A+1..N_A+N_E = environment.
"""

from __future__ import annotations

import numpy as np

MAX_SPINS = 26  # 2^26 complex amplitudes ~ 1 GiB; hard memory guard


class SpinLayout:
    """Spin index bookkeeping for the S + apparatus + environment composite.

    Parameters
    ----------
    n_apparatus : int
        Number of apparatus spins N_A.  Must be even so the zero
        magnetization sector of the apparatus is nonempty.
    n_environment : int
        Number of environment spins N_E.
    """

    def __init__(self, n_apparatus, n_environment):
        n_apparatus = int(n_apparatus)
        n_environment = int(n_environment)
        if n_apparatus < 2 or n_apparatus % 2 != 0:
            raise ValueError(f"n_apparatus must be even and >= 2, got {n_apparatus}")
        if n_environment < 0:
            raise ValueError(f"n_environment must be >= 0, got {n_environment}")
        n_total = 1 + n_apparatus + n_environment
        if n_total > MAX_SPINS:
            raise ValueError(
                f"{n_total} spins exceeds the {MAX_SPINS}-spin memory guard")
        self.n_apparatus = n_apparatus
        self.n_environment = n_environment
        self.n_total = n_total
        self.dim = 1 << n_total

    @property
    def system_index(self):
        return 0

    @property
    def apparatus_indices(self):
        return range(1, self.n_apparatus + 1)

    @property
    def environment_indices(self):
        return range(self.n_apparatus + 1, self.n_total)

    def __eq__(self, other):
        return (isinstance(other, SpinLayout)
                and other.n_apparatus == self.n_apparatus
                and other.n_environment == self.n_environment)

    def __repr__(self):
        return (f"SpinLayout(n_apparatus={self.n_apparatus}, "
                f"n_environment={self.n_environment})")


def zero_state(layout_or_dim):
    dim = layout_or_dim.dim if isinstance(layout_or_dim, SpinLayout) else int(layout_or_dim)
    return np.zeros(dim, dtype=np.complex128)


def basis_state(layout_or_dim, index):
    psi = zero_state(layout_or_dim)
    psi[index] = 1.0
    return psi


def inner(psi, phi):
    """<psi|phi> with the conjugate on the first argument."""
    return np.vdot(psi, phi)


def norm(psi):
    return float(np.linalg.norm(psi))


def normalize(psi):
    """Return psi / ||psi||; raises on a zero vector."""
    n = np.linalg.norm(psi)
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return psi / n


def scaled_add(psi, c, phi):
    """Return psi + c * phi."""
    return psi + c * phi


def tensor_product(parts):
    """Combine block states into a full state, lowest spin block first.

    The blocks must partition the spin indices in order; part 0 carries the
    least significant bits of the composite basis index.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("tensor_product needs at least one block")
    full = np.asarray(parts[0], dtype=np.complex128)
    for part in parts[1:]:
        # np.kron puts its second factor in the fast (low-bit) index
        full = np.kron(np.asarray(part, dtype=np.complex128), full)
    return full


def accumulate_two_spin_term(psi, i, j, axis, c, out, n_spins=None):
    """out += c * S_i^axis S_j^axis psi, by bit manipulation.

    Reference implementation used by the Hamiltonian compiler for oracle
    checks; the production path applies grouped terms through the numba
    kernels instead.  psi and out must have equal power-of-two lengths.
    """
    dim = psi.shape[0]
    if out.shape[0] != dim:
        raise ValueError("psi and out must share a layout")
    if n_spins is None:
        n_spins = dim.bit_length() - 1
    if i == j:
        raise ValueError("two-spin term needs distinct spins")
    if not (0 <= i < n_spins and 0 <= j < n_spins):
        raise ValueError(f"spin index out of range for {n_spins} spins")

    m = np.arange(dim)
    bi = (m >> i) & 1
    bj = (m >> j) & 1
    if axis == "z":
        # S^z S^z is diagonal: +1/4 on aligned bits, -1/4 otherwise
        sign = np.where(bi == bj, 0.25, -0.25)
        out += c * sign * psi
    elif axis == "x":
        # S^x flips a bit with amplitude 1/2
        flipped = m ^ ((1 << i) | (1 << j))
        out += (0.25 * c) * psi[flipped]
    elif axis == "y":
        # S^y = (i/2) * (lowering - raising); the double flip picks up a sign
        # +1/4 when the two bits differ, -1/4 when they are equal
        flipped = m ^ ((1 << i) | (1 << j))
        sign = np.where(bi == bj, -0.25, 0.25)
        out += c * sign * psi[flipped]
    else:
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    return out
