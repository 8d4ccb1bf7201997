"""Exact spin-1/2 dynamics of a ferromagnetic measurement apparatus.

A single test spin S couples to the order parameter of an N_A-spin
ferromagnetic chain (the apparatus), which is immersed in an N_E-spin
spin-glass-like environment.  The package propagates the full 2^(1+N_A+N_E)
dimensional wave function in real and imaginary time by Chebyshev expansion,
prepares the standard ready states, and measures coherence, correlations,
pointer readings, and entropies, with config-driven experiment runners and
the `qm` command line entry point on top.
"""

from .core import SpinLayout, inner, norm, normalize, tensor_product
from .hamiltonian import (CompiledHamiltonian, CouplingRealization,
                          HamiltonianSpec, compile_hamiltonian, draw_couplings)
from .chebyshev import evolve, imaginary_evolve, plan_imag, plan_real
from .states import (ReadyStatePrep, assemble_initial, dicke_zero,
                     random_zero_sector, system_state, thermal_state)
from .observables import (branch_weights, coherence, coherence_from_state,
                          conditional_order_parameter, conditional_rdm,
                          correlation, entropy, magnetization, rdm,
                          rdm_system_apparatus)
from .config import ExperimentConfig, load_config
from .experiments import (CalibrationResult, FitResult, SweepResult,
                          TimeSeriesResult, aggregate, child_seed, emit,
                          linear_fit, run_calibration, run_entropy,
                          run_experiment, run_quench, run_relaxation,
                          run_window_sweep)

__version__ = "0.1.0"

__all__ = [
    "SpinLayout", "inner", "norm", "normalize", "tensor_product",
    "CompiledHamiltonian", "CouplingRealization", "HamiltonianSpec",
    "compile_hamiltonian", "draw_couplings",
    "evolve", "imaginary_evolve", "plan_imag", "plan_real",
    "ReadyStatePrep", "assemble_initial", "dicke_zero", "random_zero_sector",
    "system_state", "thermal_state",
    "branch_weights", "coherence", "coherence_from_state",
    "conditional_order_parameter", "conditional_rdm", "correlation",
    "entropy", "magnetization", "rdm", "rdm_system_apparatus",
    "ExperimentConfig", "load_config",
    "CalibrationResult", "FitResult", "SweepResult", "TimeSeriesResult",
    "aggregate", "child_seed", "emit", "linear_fit",
    "run_calibration", "run_entropy", "run_experiment", "run_quench",
    "run_relaxation", "run_window_sweep",
    "__version__",
]
