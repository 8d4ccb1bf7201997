"""Chebyshev expansion of the real- and imaginary-time evolution operators.

With H rescaled to H~ = (H - c)/w (c, w from certified spectral bounds so the
spectrum of H~ lies in [-1, 1]):

    exp(-i t H)   = exp(-i t c) * sum_n (2 - d_n0) (-i)^n J_n(w t) T_n(H~)
    exp(-tau H)  ~=  sum_n (2 - d_n0) (-1)^n I_n(w tau) T_n(H~)   (un-normalized)

J_n are Bessel functions of the first kind, I_n modified Bessel functions;
the imaginary-time series is used only up to normalization, so the scaled
form ive(n, x) = I_n(x) exp(-x) replaces I_n to stay inside double range.
T_n is applied through the three-term recurrence, requiring one Hamiltonian
application per order.  Series are truncated at 1e-15 relative tail plus
three guard terms.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import ive, jv

from . import kernels

TAIL_CUTOFF = 1e-15
GUARD_TERMS = 3
MAX_IMAG_SUBSTEP = 20.0  # cap on w * d_tau per imaginary-time substep
NORM_DRIFT_ABORT = 1e-8


class ChebyshevPlan:
    """Frozen coefficient sequence for one (bounds, step) combination."""

    def __init__(self, center, halfwidth, mode, coefficients, phase, x):
        self.center = center
        self.halfwidth = halfwidth
        self.mode = mode  # "real" or "imag"
        self.coefficients = coefficients
        self.phase = phase  # global factor exp(-i c dt) (real mode)
        self.x = x  # w * dt, the Bessel argument
        self.order = len(coefficients)


def _tail_order(values):
    """Series length keeping everything above the relative tail cutoff."""
    mx = np.max(np.abs(values))
    if mx == 0.0:
        return 1
    keep = np.nonzero(np.abs(values) >= TAIL_CUTOFF * mx)[0]
    return int(keep[-1]) + 1 if keep.size else 1


def plan_real(bounds, dt):
    """Expansion of exp(-i dt H) for a spectrum inside bounds."""
    lo, hi = bounds
    if not (np.isfinite(lo) and np.isfinite(hi) and np.isfinite(dt)):
        raise ValueError("non-finite bounds or step")
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    center = 0.5 * (hi + lo)
    halfwidth = 0.5 * (hi - lo)
    if halfwidth <= 0:
        raise ValueError("bounds must have positive width")
    x = halfwidth * dt
    if x == 0.0:
        coeffs = np.ones(1, dtype=np.complex128)
    else:
        # J_n(x) decays super-exponentially once n > x; this cap is generous
        upper = int(x + 12.0 * x ** (1.0 / 3.0) + 40.0)
        bessel = jv(np.arange(upper + 1), x)
        while abs(bessel[-1]) >= TAIL_CUTOFF * np.max(np.abs(bessel)):
            upper = int(1.5 * upper) + 20
            bessel = jv(np.arange(upper + 1), x)
        m = min(_tail_order(bessel) + GUARD_TERMS, bessel.size)
        n = np.arange(m)
        # exact powers of -i; complex exponentiation would leak rounding
        minus_i_pow = np.array([1.0, -1.0j, -1.0, 1.0j])[n % 4]
        coeffs = np.where(n == 0, 1.0, 2.0) * minus_i_pow * bessel[:m]
    phase = np.exp(-1j * center * dt)
    return ChebyshevPlan(center, halfwidth, "real", coeffs, phase, x)


def plan_imag(bounds, tau):
    """Expansion of exp(-tau H) up to an overall positive factor."""
    lo, hi = bounds
    center = 0.5 * (hi + lo)
    halfwidth = 0.5 * (hi - lo)
    if halfwidth <= 0:
        raise ValueError("bounds must have positive width")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    x = halfwidth * tau
    if x == 0.0:
        coeffs = np.ones(1, dtype=np.float64)
    else:
        upper = int(x + 12.0 * x ** (1.0 / 3.0) + 40.0)
        scaled = ive(np.arange(upper + 1), x)
        while abs(scaled[-1]) >= TAIL_CUTOFF * np.max(np.abs(scaled)):
            upper = int(1.5 * upper) + 20
            scaled = ive(np.arange(upper + 1), x)
        m = min(_tail_order(scaled) + GUARD_TERMS, scaled.size)
        n = np.arange(m)
        sign = np.where(n % 2 == 0, 1.0, -1.0)
        coeffs = np.where(n == 0, 1.0, 2.0) * sign * scaled[:m]
    return ChebyshevPlan(center, halfwidth, "imag", coeffs, None, x)


@lru_cache(maxsize=512)
def _cached_real_plan(center, halfwidth, dt):
    return plan_real((center - halfwidth, center + halfwidth), dt)


def _axpy(acc, c, phi):
    """acc += c * phi without temporaries, for 1D states or column blocks."""
    a2 = acc.reshape(-1, 1) if acc.ndim == 1 else acc
    p2 = phi.reshape(-1, 1) if phi.ndim == 1 else phi
    c = complex(c)
    kernels.axpy_cplx(a2.view(np.float64), c.real, c.imag, p2.view(np.float64))


def _column_norms(x):
    if x.ndim == 1:
        return np.array([np.linalg.norm(x)])
    f = x.view(np.float64)
    ss = np.einsum("ij,ij->j", f, f)
    return np.sqrt(ss[0::2] + ss[1::2])


def _recurrence(op, plan, x):
    """sum_n coeff_n T_n(H~) x via the three-term recurrence."""
    coeffs = plan.coefficients
    x0 = np.array(x, dtype=np.complex128, order="C", copy=True)
    acc = coeffs[0] * x0
    if plan.order == 1:
        return acc
    x1 = op.apply(x0)
    _axpy(acc, coeffs[1], x1)
    scratch = np.empty_like(x0)
    for n in range(2, plan.order):
        op.cheb_step(x1, x0, scratch)
        x0, x1, scratch = x1, scratch, x0
        _axpy(acc, coeffs[n], x1)
    return acc


def evolve(psi, ham, dt, t_start=None):
    """exp(-i dt H) psi for one state or a (dim, B) C-contiguous block.

    The S-A coupling window, if any, is resolved at t_start (the segment's
    interior); callers must split propagation at the window edges.  Norm is
    preserved by construction and checked; drift beyond 1e-8 aborts, which
    signals invalid spectral bounds.
    """
    include_sa = ham.sa_active(t_start) if ham.window is not None else True
    lo, hi = ham.bounds
    if hi == lo:
        # termless Hamiltonian (e.g. a single-spin block): pure phase
        return np.asarray(psi, dtype=np.complex128) * np.exp(
            -1j * (0.5 * (hi + lo) + ham.constant) * dt)
    plan = _cached_real_plan(0.5 * (hi + lo), 0.5 * (hi - lo), float(dt))
    op = ham.scaled(include_sa, plan.center, plan.halfwidth)
    norms_in = _column_norms(psi)
    out = _recurrence(op, plan, psi)
    phase = plan.phase
    if ham.constant != 0.0:
        # scalar part of H (fully connected topology): a global phase,
        # invisible to observables but not to amplitude-level comparisons
        phase = phase * np.exp(-1j * ham.constant * dt)
    out *= phase
    norms_out = _column_norms(out)
    drift = np.max(np.abs(norms_out - norms_in))
    if drift > NORM_DRIFT_ABORT:
        raise RuntimeError(
            f"norm drift {drift:.3e} in evolve (dt={dt}); spectral bounds "
            "do not contain the spectrum")
    return out


def imaginary_evolve(psi, ham, beta, include_sa=True):
    """Normalized exp(-beta H / 2) psi, sub-stepped and renormalized.

    beta is the full inverse temperature; the applied exponent is beta/2
    (thermal pure states weight amplitudes by sqrt of the Boltzmann factor).
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    norms = _column_norms(psi)
    if np.min(norms) == 0.0:
        raise ValueError("cannot project a zero vector")
    out = np.array(psi, dtype=np.complex128, order="C", copy=True)
    out /= norms if out.ndim == 1 else norms[np.newaxis, :]
    tau_total = 0.5 * beta
    if tau_total == 0.0:
        return out
    lo, hi = ham.bounds
    halfwidth = 0.5 * (hi - lo)
    if halfwidth == 0.0:
        # termless Hamiltonian: exp(-tau c) is absorbed by normalization
        return out
    n_sub = max(1, int(np.ceil(halfwidth * tau_total / MAX_IMAG_SUBSTEP)))
    tau_step = tau_total / n_sub
    plan = plan_imag(ham.bounds, tau_step)
    op = ham.scaled(include_sa, plan.center, plan.halfwidth)
    for _ in range(n_sub):
        out = _recurrence(op, plan, out)
        norms = _column_norms(out)
        if np.min(norms) == 0.0:
            raise RuntimeError("state annihilated during imaginary evolution")
        out /= norms if out.ndim == 1 else norms[np.newaxis, :]
    return out
