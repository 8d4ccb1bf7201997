"""Numba kernels for matrix-free Hamiltonian application.

The Hamiltonian is stored as a diagonal (all z-z couplings) plus a list of
two-spin xy pair terms.  A pair (i, j) with couplings (c_x, c_y) connects
basis index m to m ^ mask where mask flips both bits; the matrix element is
(c_x - c_y)/4 when bits i and j of the target agree ("equal" channel) and
(c_x + c_y)/4 when they differ ("diff" channel).  Isotropic pairs
(c_x = c_y) have a vanishing equal channel, which the kernels skip.

Two layouts are used:

* single state: complex128[dim], pair-outer loops (best single-state cache
  behaviour on one core);
* column blocks: float64[dim, 2B] view of a C-contiguous complex128[dim, B]
  block, basis-index-outer loops so every pair gather is amortized over the
  columns.

All kernels are serial; determinism is bit-exact for a fixed build.
"""

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# diagonal assembly


@njit(cache=True)
def build_pair_diag(n_spins, i_bits, j_bits, coeffs, out):
    """out[m] += sum_t coeffs[t] * s_i(m) * s_j(m) with s = +-1/2."""
    dim = 1 << n_spins
    for t in range(i_bits.shape[0]):
        i = i_bits[t]
        j = j_bits[t]
        q = 0.25 * coeffs[t]
        for m in range(dim):
            if ((m >> i) ^ (m >> j)) & 1:
                out[m] -= q
            else:
                out[m] += q
    return out


@njit(cache=True)
def build_site_diag(n_spins, sites, coeffs, out):
    """out[m] += sum_t coeffs[t] * s_site(m) with s = +-1/2."""
    dim = 1 << n_spins
    for t in range(sites.shape[0]):
        i = sites[t]
        h = 0.5 * coeffs[t]
        for m in range(dim):
            if (m >> i) & 1:
                out[m] += h
            else:
                out[m] -= h
    return out


# ---------------------------------------------------------------------------
# single-state kernels (complex, pair-outer)


@njit(cache=True, fastmath=True)
def matvec_single(x, out, diag, i_bits, j_bits, v_eq, v_df):
    """out = diag * x + pair terms applied to x (one state)."""
    dim = diag.shape[0]
    for m in range(dim):
        out[m] = diag[m] * x[m]
    for p in range(i_bits.shape[0]):
        i = i_bits[p]
        j = j_bits[p]
        ve = v_eq[p]
        vd = v_df[p]
        si = 1 << i
        sj = 1 << j
        nlow = si
        nmid = sj >> (i + 1)
        nhigh = dim >> (j + 1)
        if ve == 0.0:
            for h in range(nhigh):
                base = h << (j + 1)
                for md in range(nmid):
                    m00 = base | (md << (i + 1))
                    m01 = m00 | si
                    m10 = m00 | sj
                    for lo in range(nlow):
                        a01 = x[m01 + lo]
                        a10 = x[m10 + lo]
                        out[m01 + lo] += vd * a10
                        out[m10 + lo] += vd * a01
        else:
            for h in range(nhigh):
                base = h << (j + 1)
                for md in range(nmid):
                    m00 = base | (md << (i + 1))
                    m01 = m00 | si
                    m10 = m00 | sj
                    m11 = m10 | si
                    for lo in range(nlow):
                        a00 = x[m00 + lo]
                        a01 = x[m01 + lo]
                        a10 = x[m10 + lo]
                        a11 = x[m11 + lo]
                        out[m00 + lo] += ve * a11
                        out[m01 + lo] += vd * a10
                        out[m10 + lo] += vd * a01
                        out[m11 + lo] += ve * a00


@njit(cache=True, fastmath=True)
def cheb_step_single(x, y, out, diag, i_bits, j_bits, v_eq, v_df):
    """out = 2 * (diag * x + pairs(x)) - y, the Chebyshev recurrence step."""
    dim = diag.shape[0]
    for m in range(dim):
        out[m] = 2.0 * (diag[m] * x[m]) - y[m]
    for p in range(i_bits.shape[0]):
        i = i_bits[p]
        j = j_bits[p]
        ve = 2.0 * v_eq[p]
        vd = 2.0 * v_df[p]
        si = 1 << i
        sj = 1 << j
        nlow = si
        nmid = sj >> (i + 1)
        nhigh = dim >> (j + 1)
        if ve == 0.0:
            for h in range(nhigh):
                base = h << (j + 1)
                for md in range(nmid):
                    m00 = base | (md << (i + 1))
                    m01 = m00 | si
                    m10 = m00 | sj
                    for lo in range(nlow):
                        a01 = x[m01 + lo]
                        a10 = x[m10 + lo]
                        out[m01 + lo] += vd * a10
                        out[m10 + lo] += vd * a01
        else:
            for h in range(nhigh):
                base = h << (j + 1)
                for md in range(nmid):
                    m00 = base | (md << (i + 1))
                    m01 = m00 | si
                    m10 = m00 | sj
                    m11 = m10 | si
                    for lo in range(nlow):
                        a00 = x[m00 + lo]
                        a01 = x[m01 + lo]
                        a10 = x[m10 + lo]
                        a11 = x[m11 + lo]
                        out[m00 + lo] += ve * a11
                        out[m01 + lo] += vd * a10
                        out[m10 + lo] += vd * a01
                        out[m11 + lo] += ve * a00


# ---------------------------------------------------------------------------
# blocked kernels (float64 view of complex columns, index-outer)


@njit(cache=True, fastmath=True)
def matvec_block(xf, outf, diag, masks, i_bits, j_bits, v_eq, v_df,
                 iso_masks, iso_i, iso_j, iso_v):
    """outf = H xf on a (dim, 2B) float view of B complex columns.

    Anisotropic pairs (arrays 4-8) are applied through both channels;
    isotropic pairs (arrays 9-12) only act when bits i and j differ.
    """
    dim = diag.shape[0]
    b2 = xf.shape[1]
    n_aniso = masks.shape[0]
    n_iso = iso_masks.shape[0]
    for m in range(dim):
        d = diag[m]
        for b in range(b2):
            outf[m, b] = d * xf[m, b]
        for p in range(n_aniso):
            idx = m ^ masks[p]
            if ((m >> i_bits[p]) ^ (m >> j_bits[p])) & 1:
                v = v_df[p]
            else:
                v = v_eq[p]
            for b in range(b2):
                outf[m, b] += v * xf[idx, b]
        for p in range(n_iso):
            if ((m >> iso_i[p]) ^ (m >> iso_j[p])) & 1:
                idx = m ^ iso_masks[p]
                v = iso_v[p]
                for b in range(b2):
                    outf[m, b] += v * xf[idx, b]


@njit(cache=True, fastmath=True)
def cheb_step_block(xf, yf, outf, diag, masks, i_bits, j_bits, v_eq, v_df,
                    iso_masks, iso_i, iso_j, iso_v):
    """outf = 2 * H xf - yf on a (dim, 2B) float view."""
    dim = diag.shape[0]
    b2 = xf.shape[1]
    n_aniso = masks.shape[0]
    n_iso = iso_masks.shape[0]
    for m in range(dim):
        d = diag[m]
        for b in range(b2):
            outf[m, b] = d * xf[m, b]
        for p in range(n_aniso):
            idx = m ^ masks[p]
            if ((m >> i_bits[p]) ^ (m >> j_bits[p])) & 1:
                v = v_df[p]
            else:
                v = v_eq[p]
            for b in range(b2):
                outf[m, b] += v * xf[idx, b]
        for p in range(n_iso):
            if ((m >> iso_i[p]) ^ (m >> iso_j[p])) & 1:
                idx = m ^ iso_masks[p]
                v = iso_v[p]
                for b in range(b2):
                    outf[m, b] += v * xf[idx, b]
        for b in range(b2):
            outf[m, b] = 2.0 * outf[m, b] - yf[m, b]


@njit(cache=True, fastmath=True)
def axpy_cplx(accf, c_re, c_im, phif):
    """acc += c * phi on (dim, 2B) float views of complex columns."""
    dim = accf.shape[0]
    b2 = accf.shape[1]
    for m in range(dim):
        for b in range(0, b2, 2):
            pr = phif[m, b]
            pi = phif[m, b + 1]
            accf[m, b] += c_re * pr - c_im * pi
            accf[m, b + 1] += c_re * pi + c_im * pr


@njit(cache=True, fastmath=True)
def diag_expect_block(xf, diag, out_re):
    """out_re[b] = <x_b| diag |x_b> per complex column b."""
    dim = diag.shape[0]
    nb = out_re.shape[0]
    for b in range(nb):
        out_re[b] = 0.0
    for m in range(dim):
        d = diag[m]
        for b in range(nb):
            re = xf[m, 2 * b]
            im = xf[m, 2 * b + 1]
            out_re[b] += d * (re * re + im * im)
