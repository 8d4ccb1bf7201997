"""Reduced density matrices, coherence, entropy, correlations, and pointers.

The quantities of interest: the system+apparatus reduced density matrix (the
environment is traced out), the test-spin coherence rho_ud, the apparatus
density matrix conditioned on the test spin pointing up or down, its von
Neumann entropy, and the z correlation / magnetization order parameters in
Pauli normalization (2 S^alpha = sigma^alpha, divided by N_A).
"""

from __future__ import annotations

import numpy as np

RDM_MAX_KEPT = 10  # 2^10 x 2^10 dense output guard
EIG_CLAMP = -1e-10  # eigenvalues below this are non-physical
EIG_ZERO = 1e-12  # eigenvalues at or below this contribute no entropy


def rdm(psi, kept_spins, n_spins=None):
    """Partial trace of |psi><psi| keeping the given spins.

    kept_spins are bit positions; the output matrix indexes kept spins with
    the lowest kept spin as its least significant bit.  Keeping the k lowest
    spins is a contiguous reshape; any other set pays one transposed copy.
    """
    dim = psi.shape[0]
    if n_spins is None:
        n_spins = dim.bit_length() - 1
    kept = sorted(set(int(s) for s in kept_spins))
    if len(kept) > RDM_MAX_KEPT:
        raise ValueError(f"keeping {len(kept)} spins exceeds the "
                         f"{RDM_MAX_KEPT}-spin guard")
    if not kept or kept[0] < 0 or kept[-1] >= n_spins:
        raise ValueError("kept spins out of range")
    k = len(kept)
    if kept == list(range(k)):
        block = psi.reshape(-1, 1 << k)
    else:
        # numpy axis 0 is the most significant bit after reshape to (2,)*n
        tens = psi.reshape((2,) * n_spins)
        kept_axes = [n_spins - 1 - s for s in kept]
        other_axes = [ax for ax in range(n_spins) if ax not in kept_axes]
        # kept axes go last, in descending spin order, so the lowest kept
        # spin is the fastest index of the flattened block
        tens = tens.transpose(other_axes + sorted(kept_axes))
        block = tens.reshape(-1, 1 << k)
    return block.T @ block.conj()


def rdm_system_apparatus(psi, layout):
    """rho_SA: trace out the environment (contiguous fast path)."""
    d_sa = 1 << (layout.n_apparatus + 1)
    block = psi.reshape(-1, d_sa)
    return block.T @ block.conj()


def coherence(rho_sa):
    """Test-spin off-diagonal element Tr_A <up| rho_SA |down>."""
    return complex(np.trace(rho_sa[1::2, 0::2]))


def coherence_from_state(psi):
    """Same as coherence(rdm_system_apparatus(...)) without forming the RDM."""
    u = psi.reshape(-1, 2)
    return complex(np.vdot(u[:, 0], u[:, 1]))


def branch_weights(psi):
    """(Tr rho_uu, Tr rho_dd): probabilities of the test spin up and down."""
    u = psi.reshape(-1, 2)
    w_down = float(np.sum(u[:, 0].real ** 2 + u[:, 0].imag ** 2))
    w_up = float(np.sum(u[:, 1].real ** 2 + u[:, 1].imag ** 2))
    return w_up, w_down


def conditional_rdm(rho_sa, branch):
    """Normalized apparatus RDM conditioned on the test spin state.

    branch is "up"/"down" (or 1/0).  Raises when the branch weight vanishes,
    e.g. the up branch at a = 0.
    """
    i = _branch_bit(branch)
    block = rho_sa[i::2, i::2]
    weight = float(np.trace(block).real)
    if weight <= 1e-12:
        raise ValueError(f"branch {branch!r} has vanishing weight {weight:.3e}")
    return block / weight


def conditional_rdm_from_state(psi, branch, layout):
    """Conditional apparatus RDM by slicing the system bit, then tracing E."""
    i = _branch_bit(branch)
    u = psi.reshape(-1, 2)[:, i]
    block = u.reshape(-1, 1 << layout.n_apparatus)
    rho = block.T @ block.conj()
    weight = float(np.trace(rho).real)
    if weight <= 1e-12:
        raise ValueError(f"branch {branch!r} has vanishing weight {weight:.3e}")
    return rho / weight


def _branch_bit(branch):
    if branch in (1, "up"):
        return 1
    if branch in (0, "down"):
        return 0
    raise ValueError(f"branch must be 'up'/'down' or 1/0, got {branch!r}")


def entropy(rho):
    """Von Neumann entropy -Tr[rho ln rho] in nats.

    Eigenvalues in [-1e-10, 0) are clamped to zero (partial-trace rounding);
    anything below -1e-10 is rejected as non-physical.
    """
    lam = np.linalg.eigvalsh(rho)
    if lam[0] < EIG_CLAMP:
        raise ValueError(f"density matrix has eigenvalue {lam[0]:.3e} below "
                         f"the {EIG_CLAMP} clamp window")
    lam = lam[lam > EIG_ZERO]
    if lam.size == 0:
        return 0.0
    return float(-np.dot(lam, np.log(lam)))


def _apparatus_popcount(dim, layout):
    m = np.arange(dim, dtype=np.uint64)
    a_mask = np.uint64(((1 << layout.n_apparatus) - 1) << 1)
    return np.bitwise_count(m & a_mask).astype(np.float64)


def magnetization(psi, layout):
    """<sigma^z_A> / N_A on the full state (order parameter)."""
    n_a = layout.n_apparatus
    pop = _apparatus_popcount(psi.shape[0], layout)
    weights = psi.real ** 2 + psi.imag ** 2
    return float(np.dot(weights, 2.0 * pop - n_a) / n_a)


def system_z(psi):
    """<sigma^z_S>, the conserved test-spin polarization."""
    w_up, w_down = branch_weights(psi)
    return w_up - w_down


def correlation(psi, layout, axis="z"):
    """<sigma^axis_S sigma^axis_A> / N_A on the full state.

    The z axis is a diagonal expectation; x and y apply the pair kernels of
    the term reference implementation (used at sample times only).
    """
    n_a = layout.n_apparatus
    if axis == "z":
        m = np.arange(psi.shape[0], dtype=np.uint64)
        s0 = (m & np.uint64(1)).astype(np.float64) - 0.5
        pop = _apparatus_popcount(psi.shape[0], layout)
        s_a = pop - 0.5 * n_a
        weights = psi.real ** 2 + psi.imag ** 2
        return float(np.dot(weights, s0 * s_a) * 4.0 / n_a)
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    from .core import accumulate_two_spin_term

    acc = np.zeros_like(psi)
    for i in layout.apparatus_indices:
        accumulate_two_spin_term(psi, 0, i, axis, 1.0, acc,
                                 n_spins=layout.n_total)
    return float(np.real(np.vdot(psi, acc)) * 4.0 / n_a)


def conditional_order_parameter(rho_sa, branch, layout):
    """Pointer reading Tr[sigma^z_A rho~_ii] / N_A for one branch."""
    rho = conditional_rdm(rho_sa, branch)
    return _order_parameter_of_rdm(rho, layout.n_apparatus)


def order_parameter_from_state(psi, branch, layout):
    """Pointer reading computed by the branch-slice route (no rho_SA)."""
    i = _branch_bit(branch)
    u = psi.reshape(-1, 2)[:, i]
    weights = u.real ** 2 + u.imag ** 2
    w = float(np.sum(weights))
    if w <= 1e-12:
        raise ValueError(f"branch {branch!r} has vanishing weight {w:.3e}")
    n_a = layout.n_apparatus
    m = np.arange(u.shape[0], dtype=np.uint64)
    a_mask = np.uint64((1 << n_a) - 1)
    pop = np.bitwise_count(m & a_mask).astype(np.float64)
    return float(np.dot(weights, 2.0 * pop - n_a) / (w * n_a))


def _order_parameter_of_rdm(rho, n_apparatus):
    p = np.arange(rho.shape[0], dtype=np.uint64)
    pop = np.bitwise_count(p).astype(np.float64)
    return float(np.real(np.dot(np.diag(rho).real, 2.0 * pop - n_apparatus))
                 / n_apparatus)


def check_rdm(rho, tol_trace=1e-10, tol_herm=1e-12, tol_psd=-1e-10):
    """Assert Hermiticity, unit trace, and positivity; used as telemetry."""
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol_trace:
        raise ValueError(f"RDM trace {tr} deviates from 1 beyond {tol_trace}")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > tol_herm:
        raise ValueError(f"RDM non-Hermitian by {herm:.3e}")
    lam_min = float(np.linalg.eigvalsh(rho)[0])
    if lam_min < tol_psd:
        raise ValueError(f"RDM eigenvalue {lam_min:.3e} below {tol_psd}")
    return True
