"""Mapping the working range: correlation vs coupling strength and bath size.

The meter needs the apparatus-environment coupling inside a window:
too weak and nothing relaxes onto the pointer, too strong and the
environment scrambles the registration.  Sweeping the magnitude at
several bath sizes shows the window and how it widens with N_E.
"""

from spinmeter import ExperimentConfig, run_window_sweep


def main():
    cfg = ExperimentConfig(scenario="sweep", env_sizes=[4, 6],
                           sweep_values=[1e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0],
                           n_r=3, t_eval=150.0, t_max=150.0, master_seed=42)
    res = run_window_sweep(cfg)

    print(f"axis {cfg.sweep_axis} (sign applied internally), "
          f"correlation at t = {cfg.t_eval:g}\n")
    header = "".join(f" N_E={n:<6}" for n in res.env_sizes)
    print(f"{'|value|':>8}" + header)
    for iv, v in enumerate(res.coupling_values):
        row = "".join(f" {res.correlation[ie, iv]:>9.4f}"
                      for ie in range(res.env_sizes.size))
        print(f"{v:>8.3f}" + row)

    for ie, n in enumerate(res.env_sizes):
        best = res.correlation[ie].argmax()
        print(f"\nN_E={n}: max correlation {res.correlation[ie, best]:.4f} "
              f"at |value| = {res.coupling_values[best]:g}")


if __name__ == "__main__":
    main()
