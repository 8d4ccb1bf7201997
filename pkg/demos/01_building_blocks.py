"""Tour of the low-level pieces: layout, couplings, Hamiltonian, propagator.

A single test spin S sits on bit 0, the apparatus chain A on the next
N_A bits, the spin-glass environment E above those.  Everything
downstream (preparations, experiments) is built from the three objects
shown here.
"""

import numpy as np

from spinmeter import (HamiltonianSpec, SpinLayout, compile_hamiltonian,
                       dicke_zero, draw_couplings, evolve, system_state,
                       tensor_product)


def main():
    layout = SpinLayout(n_apparatus=4, n_environment=4)
    print(f"layout: S + {layout.n_apparatus} apparatus "
          f"+ {layout.n_environment} environment spins, dim {layout.dim}")

    spec = HamiltonianSpec()  # production couplings
    print(f"spec: J={spec.J}, I_SA={spec.I_SA}, I_AE={spec.I_AE}, "
          f"K={spec.K}, topology={spec.topology}")

    # the glass part is a random realization, reproducible from one seed
    realization = draw_couplings(layout, seed=7)
    print(f"glass draws: r_ae {realization.r_ae.shape} in [0,1], "
          f"r_ee {realization.r_ee.shape} in [-1,1] per axis")

    ham = compile_hamiltonian(spec, layout, realization)
    lo, hi = ham.bounds
    print(f"certified spectral bounds: [{lo:.3f}, {hi:.3f}]")

    # product start: S up, apparatus in the M = 0 Dicke state,
    # environment all-down (one basis vector)
    env = np.zeros(1 << layout.n_environment)
    env[0] = 1.0
    psi = tensor_product([system_state(1.0), dicke_zero(layout.n_apparatus),
                          env])

    e0 = ham.expectation(psi)
    print(f"\nenergy of the product start: {e0:+.6f}")

    # one long stride of real-time evolution per target; the expansion
    # order adapts to bandwidth x step, there is no fixed small dt
    for t in (1.0, 10.0, 100.0):
        out = evolve(psi, ham, t)
        drift = abs(np.linalg.norm(out) - 1.0)
        de = ham.expectation(out) - e0
        print(f"  t = {t:>6.1f}: norm drift {drift:.2e}, "
              f"energy drift {de:+.2e}")


if __name__ == "__main__":
    main()
