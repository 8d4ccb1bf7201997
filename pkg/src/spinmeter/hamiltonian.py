"""Coupling realizations and matrix-free compilation of the model Hamiltonian.

H = H_SA + H_A + H_AE + H_E on the S + apparatus + environment composite:

* H_A   = -J sum_bonds S_i . S_{i+1}         ferromagnetic apparatus chain,
          optional -Delta sum_bonds S^z S^z  anisotropy, or a fully connected
          -(J/N_A) S_A . S_A                 variant (pairwise expansion);
* H_SA  = -I_SA S^z_S sum_{i in A} S^z_i     z-only test-spin coupling,
          optionally active only inside a time window [t1, t2];
* H_AE  = -I_AE sum_{i in A, k in E} r_ik S_i . S_k,   r_ik uniform in [0, 1];
* H_E   =  K sum_{k<l in E} sum_axis r^axis_kl S^axis_k S^axis_l,
          r^axis_kl uniform in [-1, 1], independent per axis.

Everything is compiled to a static diagonal (all z-z couplings), a switchable
S-A diagonal, and xy pair-term tables consumed by the kernels.  No matrix is
ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import SpinLayout

AXES = ("x", "y", "z")
TOPOLOGIES = ("open_chain", "fully_connected")


@dataclass(frozen=True)
class HamiltonianSpec:
    """Couplings and topology; defaults are the production parameter set."""

    J: float = 1.0
    I_SA: float = 0.25
    I_AE: float = -0.025
    K: float = -0.1
    delta: float = 0.0
    topology: str = "open_chain"
    window: tuple | None = None  # (t1, t2); S-A coupling active only inside

    def __post_init__(self):
        if self.J <= 0:
            raise ValueError("J must be positive (ferromagnetic chain)")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.window is not None:
            t1, t2 = self.window
            if not t1 < t2:
                raise ValueError("window must satisfy t1 < t2")


class CouplingRealization:
    """Frozen random couplings r_ae in [0,1] and r_ee in [-1,1].

    Draw order is fixed for reproducibility: first r_ae as an (N_A, N_E)
    row-major block of uniforms, then r_ee as a (3, n_pairs) block (axis
    major, pairs in lexicographic k < l order), both from one PCG64 stream.
    """

    def __init__(self, r_ae, r_ee, seed_key=None):
        self.r_ae = np.asarray(r_ae, dtype=np.float64)
        self.r_ee = np.asarray(r_ee, dtype=np.float64)
        self.seed_key = seed_key
        if self.r_ae.size and (self.r_ae.min() < 0.0 or self.r_ae.max() > 1.0):
            raise ValueError("r_ae entries must lie in [0, 1]")
        if self.r_ee.size and (self.r_ee.min() < -1.0 or self.r_ee.max() > 1.0):
            raise ValueError("r_ee entries must lie in [-1, 1]")


def environment_pairs(layout):
    """Ordered list of environment spin pairs (k < l), full-system indices."""
    env = list(layout.environment_indices)
    return [(k, l) for a, k in enumerate(env) for l in env[a + 1:]]


def draw_couplings(layout, seed):
    """Draw a CouplingRealization deterministically from a seed.

    seed may be an int or a numpy SeedSequence; the same value always
    reproduces the same couplings bit for bit.
    """
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.PCG64(ss))
    n_a, n_e = layout.n_apparatus, layout.n_environment
    r_ae = rng.random((n_a, n_e))
    n_pairs = n_e * (n_e - 1) // 2
    r_ee = 2.0 * rng.random((3, n_pairs)) - 1.0
    return CouplingRealization(r_ae, r_ee, seed_key=ss.entropy)


def _apparatus_bonds(layout, topology):
    apparatus = list(layout.apparatus_indices)
    if topology == "open_chain":
        return list(zip(apparatus[:-1], apparatus[1:]))
    # fully connected: every unordered apparatus pair is a bond
    return [(i, j) for a, i in enumerate(apparatus) for j in apparatus[a + 1:]]


def build_term_lists(spec, layout, realization):
    """Expand the Hamiltonian into (i, j, axis, coefficient) terms.

    Returns (static_terms, sa_terms, constant).  The constant is the dropped
    self-pair energy of the fully connected topology (-3J/4); it only shifts
    the spectrum and is excluded from dynamics.
    """
    n_a = layout.n_apparatus
    static_terms = []
    constant = 0.0

    bonds = _apparatus_bonds(layout, spec.topology)
    if spec.topology == "open_chain":
        bond_coeff = -spec.J
    else:
        # S_A.S_A = sum_i S_i^2 + 2 sum_{i<j} S_i.S_j; the self part is the
        # constant 3 N_A / 4
        bond_coeff = -2.0 * spec.J / n_a
        constant = -spec.J / n_a * 0.75 * n_a
    for (i, j) in bonds:
        for axis in AXES:
            static_terms.append((i, j, axis, bond_coeff))
        if spec.delta != 0.0:
            static_terms.append((i, j, "z", -spec.delta))

    expected_ae = (n_a, layout.n_environment)
    if realization.r_ae.shape != expected_ae:
        raise ValueError(f"r_ae shape {realization.r_ae.shape} does not match "
                         f"layout {expected_ae}")
    for a, i in enumerate(layout.apparatus_indices):
        for e, k in enumerate(layout.environment_indices):
            c = -spec.I_AE * realization.r_ae[a, e]
            for axis in AXES:
                static_terms.append((i, k, axis, c))

    pairs = environment_pairs(layout)
    if realization.r_ee.shape != (3, len(pairs)):
        raise ValueError(f"r_ee shape {realization.r_ee.shape} does not match "
                         f"{len(pairs)} environment pairs")
    for ax, axis in enumerate(AXES):
        for p, (k, l) in enumerate(pairs):
            static_terms.append((k, l, axis, spec.K * realization.r_ee[ax, p]))

    sa_terms = [(layout.system_index, i, "z", -spec.I_SA)
                for i in layout.apparatus_indices]
    return static_terms, sa_terms, constant


class CompiledHamiltonian:
    """Kernel-ready form of a term list: diagonals, pair tables, bounds.

    Layout-agnostic: only the spin count matters, so the same class also
    serves the environment-block and apparatus+environment-block
    sub-Hamiltonians used for thermal state preparation.
    """

    def __init__(self, n_spins, static_terms, sa_terms=(), constant=0.0,
                 window=None):
        self.n_spins = int(n_spins)
        self.dim = 1 << self.n_spins
        self.static_terms = list(static_terms)
        self.sa_terms = list(sa_terms)
        self.constant = float(constant)
        self.window = window
        self._check_terms()
        self._build_diagonals()
        self._build_pair_tables()
        all_terms = self.static_terms + self.sa_terms
        radius = 1.05 * sum(abs(c) for (_, _, _, c) in all_terms) / 4.0
        self.bounds = (-radius, radius)
        self._scaled_cache = {}

    def _check_terms(self):
        for (i, j, axis, c) in self.static_terms + self.sa_terms:
            if i == j or not (0 <= i < self.n_spins and 0 <= j < self.n_spins):
                raise ValueError(f"bad term indices ({i}, {j})")
            if axis not in AXES:
                raise ValueError(f"bad axis {axis!r}")
            if not np.isfinite(c):
                raise ValueError("non-finite coefficient")

    def _build_diagonals(self):
        def z_diag(terms):
            zi = np.array([t[0] for t in terms if t[2] == "z"], dtype=np.int64)
            zj = np.array([t[1] for t in terms if t[2] == "z"], dtype=np.int64)
            zc = np.array([t[3] for t in terms if t[2] == "z"], dtype=np.float64)
            out = np.zeros(self.dim, dtype=np.float64)
            if zi.size:
                kernels.build_pair_diag(self.n_spins, zi, zj, zc, out)
            return out

        self.diag_static = z_diag(self.static_terms)
        self.diag_sa = z_diag(self.sa_terms)

    def _build_pair_tables(self):
        # group xy couplings by unordered pair; z parts already live in the
        # diagonal, and S-A terms are z-only by construction
        for (i, j, axis, _c) in self.sa_terms:
            if axis != "z":
                raise ValueError("S-A terms must be z-axis only")
        grouped = {}
        for (i, j, axis, c) in self.static_terms:
            if axis == "z":
                continue
            key = (min(i, j), max(i, j))
            cx, cy = grouped.get(key, (0.0, 0.0))
            if axis == "x":
                cx += c
            else:
                cy += c
            grouped[key] = (cx, cy)

        items = sorted(grouped.items())
        i_bits = np.array([k[0] for k, _ in items], dtype=np.int64)
        j_bits = np.array([k[1] for k, _ in items], dtype=np.int64)
        v_eq = np.array([(cx - cy) / 4.0 for _, (cx, cy) in items],
                        dtype=np.float64)
        v_df = np.array([(cx + cy) / 4.0 for _, (cx, cy) in items],
                        dtype=np.float64)
        keep = (v_eq != 0.0) | (v_df != 0.0)
        self.pair_i = i_bits[keep]
        self.pair_j = j_bits[keep]
        self.pair_v_eq = v_eq[keep]
        self.pair_v_df = v_df[keep]

    def sa_active(self, t=None):
        """Whether the S-A coupling is on at time t (always on, no window)."""
        if self.window is None:
            return True
        if t is None:
            raise ValueError("windowed Hamiltonian needs a time to decide "
                             "S-A activity")
        t1, t2 = self.window
        return t1 <= t <= t2

    def diagonal(self, include_sa=True):
        if include_sa and self.sa_terms:
            return self.diag_static + self.diag_sa
        return self.diag_static

    def scaled(self, include_sa=True, center=0.0, halfwidth=1.0):
        """Kernel-ready (H - center) / halfwidth operator, cached."""
        key = (bool(include_sa), float(center), float(halfwidth))
        op = self._scaled_cache.get(key)
        if op is None:
            op = ScaledOperator(self, *key)
            self._scaled_cache[key] = op
        return op

    def apply(self, psi, out=None, include_sa=True):
        """H psi for a single state or a (dim, B) column block."""
        return self.scaled(include_sa).apply(psi, out)

    def expectation(self, psi, include_sa=True):
        """<psi|H|psi> (plus the topology constant) for one state."""
        h_psi = self.apply(psi, include_sa=include_sa)
        return float(np.real(np.vdot(psi, h_psi))) + self.constant

    def all_terms(self, include_sa=True):
        """Canonical term list, for audits and dense oracles."""
        terms = list(self.static_terms)
        if include_sa:
            terms += self.sa_terms
        return terms


class ScaledOperator:
    """(H - center)/halfwidth with the S-A block folded in or left out."""

    def __init__(self, ham, include_sa, center, halfwidth):
        if halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        self.dim = ham.dim
        self.include_sa = include_sa
        self.center = center
        self.halfwidth = halfwidth
        inv = 1.0 / halfwidth
        self.diag = (ham.diagonal(include_sa) - center) * inv
        v_eq = ham.pair_v_eq * inv
        v_df = ham.pair_v_df * inv
        iso = v_eq == 0.0
        masks = (np.int64(1) << ham.pair_i) | (np.int64(1) << ham.pair_j)
        self.i_bits = ham.pair_i
        self.j_bits = ham.pair_j
        self.v_eq = v_eq
        self.v_df = v_df
        self.an_masks = masks[~iso]
        self.an_i = ham.pair_i[~iso]
        self.an_j = ham.pair_j[~iso]
        self.an_v_eq = v_eq[~iso]
        self.an_v_df = v_df[~iso]
        self.iso_masks = masks[iso]
        self.iso_i = ham.pair_i[iso]
        self.iso_j = ham.pair_j[iso]
        self.iso_v = v_df[iso]

    def apply(self, x, out=None):
        if x.ndim == 1:
            if out is None:
                out = np.empty_like(x)
            kernels.matvec_single(x, out, self.diag, self.i_bits, self.j_bits,
                                  self.v_eq, self.v_df)
            return out
        if out is None:
            out = np.empty_like(x)
        kernels.matvec_block(_fview(x), _fview(out), self.diag,
                             self.an_masks, self.an_i, self.an_j,
                             self.an_v_eq, self.an_v_df,
                             self.iso_masks, self.iso_i, self.iso_j,
                             self.iso_v)
        return out

    def cheb_step(self, x, y, out):
        """out = 2 (H~ x) - y, one three-term recurrence step."""
        if x.ndim == 1:
            kernels.cheb_step_single(x, y, out, self.diag, self.i_bits,
                                     self.j_bits, self.v_eq, self.v_df)
        else:
            kernels.cheb_step_block(_fview(x), _fview(y), _fview(out),
                                    self.diag,
                                    self.an_masks, self.an_i, self.an_j,
                                    self.an_v_eq, self.an_v_df,
                                    self.iso_masks, self.iso_i, self.iso_j,
                                    self.iso_v)


def _fview(x):
    """(dim, 2B) float64 view of a C-contiguous (dim, B) complex block."""
    if not x.flags.c_contiguous:
        raise ValueError("column blocks must be C-contiguous")
    return x.view(np.float64)


def compile_hamiltonian(spec, layout, realization):
    """Full-system CompiledHamiltonian from a spec and drawn couplings."""
    static_terms, sa_terms, constant = build_term_lists(spec, layout,
                                                        realization)
    return CompiledHamiltonian(layout.n_total, static_terms, sa_terms,
                               constant=constant, window=spec.window)


def _shift_terms(terms, shift):
    return [(i - shift, j - shift, axis, c) for (i, j, axis, c) in terms]


def environment_hamiltonian(spec, layout, realization):
    """H_E alone on the N_E-spin environment block (indices from 0)."""
    static_terms, _, _ = build_term_lists(spec, layout, realization)
    env_lo = layout.n_apparatus + 1
    env_terms = [t for t in static_terms if t[0] >= env_lo and t[1] >= env_lo]
    return CompiledHamiltonian(layout.n_environment,
                               _shift_terms(env_terms, env_lo))


def joint_block_hamiltonian(spec, layout, realization):
    """H_A + H_AE + H_E on the apparatus+environment block (indices from 0).

    The S-A coupling is excluded: the thermal projection acts on the ready
    state before the test spin is attached.
    """
    static_terms, _, constant = build_term_lists(spec, layout, realization)
    return CompiledHamiltonian(layout.n_apparatus + layout.n_environment,
                               _shift_terms(static_terms, 1),
                               constant=constant)


def apply_hamiltonian(ham, psi, t=None, out=None):
    """H(t) psi, honouring the S-A coupling window when one is set."""
    return ham.apply(psi, out=out, include_sa=ham.sa_active(t))
