"""The three apparatus preparations and what distinguishes them.

dicke0      zero-magnetization Dicke state of A, environment drawn from
            a thermal ensemble of its own Hamiltonian; pure A, S(A) = 0.
randomR     a random vector in the zero-magnetization sector of A,
            thermal environment; same pointer value, much rougher state.
jointBeta   one thermal draw of the coupled A+E block; A and E arrive
            already entangled, the realistic "device at temperature 1/beta".

All three are combined with the test spin as sqrt(a)|up> + sqrt(1-a)|down>.
"""

import numpy as np

from spinmeter import (HamiltonianSpec, SpinLayout, assemble_initial,
                       conditional_rdm, draw_couplings, entropy,
                       magnetization, rdm_system_apparatus)


def main():
    layout = SpinLayout(4, 4)
    spec = HamiltonianSpec()
    realization = draw_couplings(layout, seed=7)
    a, beta = 0.75, 50.0

    print(f"a = {a}, beta = {beta}, dim {layout.dim}")
    print(f"{'prep':>10} {'<sigma^z_A>':>12} {'S(A|up)':>9} {'S_max':>7}")
    cap = layout.n_apparatus * np.log(2.0)
    for kind in ("dicke0", "randomR", "jointBeta"):
        psi = assemble_initial(a, kind, beta, seed=11, spec=spec,
                               layout=layout, realization=realization)
        rho = rdm_system_apparatus(psi, layout)
        s_up = entropy(conditional_rdm(rho, "up"))
        print(f"{kind:>10} {magnetization(psi, layout):>12.4f} "
              f"{s_up:>9.4f} {cap:>7.4f}")

    # the preparations are seeded: same seed, same state
    one = assemble_initial(a, "randomR", beta, 3, spec=spec, layout=layout,
                           realization=realization)
    two = assemble_initial(a, "randomR", beta, 3, spec=spec, layout=layout,
                           realization=realization)
    print(f"\nsame-seed overlap |<one|two>| = "
          f"{abs(np.vdot(one, two)):.12f}")


if __name__ == "__main__":
    main()
