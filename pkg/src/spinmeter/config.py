"""Experiment configuration: defaults, JSON loading, validation.

A config is a plain dataclass whose JSON field names match the attribute
names one-to-one.  Unset fields resolve to scenario-dependent defaults in
``resolve()``; the resolved object is what runners consume and what lands in
``meta.json``.
"""

import dataclasses
import json
import math

import numpy as np

from .hamiltonian import HamiltonianSpec
from .states import canonical_ready_kind

SCENARIOS = ("relax", "entropy", "calibrate", "quench", "sweep")
SWEEP_AXES = ("I_SA", "I_AE", "K")

# realization counts used when the config does not set n_r
DEFAULT_N_R = {"relax": 15, "entropy": 1, "calibrate": 2, "quench": 5,
               "sweep": 4}
# evolution span when neither time_grid nor t_max is given; quench derives
# its span from the window instead
DEFAULT_T_MAX = {"relax": 1.0e4, "entropy": 1.0e4, "calibrate": 1.0e4,
                 "sweep": 1.0e3}
TIME_GRID_POINTS = 60
GRID_T_FIRST = 0.1  # first nonzero sample; grid = {0} U geomspace to t_max

_HAMILTONIAN_KEYS = ("J", "I_SA", "I_AE", "K", "delta", "topology")


@dataclasses.dataclass
class ExperimentConfig:
    """Inputs of one experiment run; None means scenario default."""

    scenario: str = None
    N_A: int = 4
    N_E: int = 12
    a: float = 0.75
    ready: str = "dicke_zero"
    beta: float = 50.0
    hamiltonian: HamiltonianSpec = None
    n_r: int = None
    master_seed: int = 2024
    redraw_couplings: bool = False
    time_grid: list = None
    t_max: float = None
    t1: float = None  # quench only
    t2: float = None
    a_grid: list = None  # calibrate only
    t_measure: float = None
    sweep_axis: str = None  # sweep only
    sweep_values: list = None
    env_sizes: list = None
    t_eval: float = None
    control_arm: bool = True  # quench: also evolve the never-coupled twin
    out_dir: str = None
    threads: int = None

    def resolve(self):
        """Fill scenario defaults and validate; returns a new config."""
        c = dataclasses.replace(self)
        if c.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {c.scenario!r}; "
                             f"expected one of {SCENARIOS}")
        c.ready = canonical_ready_kind(c.ready)
        if not 0.0 <= c.a <= 1.0:
            raise ValueError(f"a = {c.a} outside [0, 1]")
        if c.beta < 0:
            raise ValueError("beta must be nonnegative")
        if c.hamiltonian is None:
            c.hamiltonian = HamiltonianSpec()
        if c.n_r is None:
            c.n_r = DEFAULT_N_R[c.scenario]
        if c.n_r < 1:
            raise ValueError("n_r must be at least 1")
        if c.scenario == "entropy" and c.a == 0.0:
            raise ValueError("entropy scenario conditions on the up branch; "
                             "a = 0 leaves it empty")

        if c.scenario == "quench":
            if c.t1 is None or c.t2 is None:
                c.t1, c.t2 = 2.5e3, 5.0e3
            if not 0.0 < c.t1 < c.t2:
                raise ValueError(f"need 0 < t1 < t2, got ({c.t1}, {c.t2})")
            c.hamiltonian = dataclasses.replace(
                c.hamiltonian, window=(float(c.t1), float(c.t2)))
            if c.t_max is None and c.time_grid is None:
                c.t_max = 2.0 * c.t2
        elif c.t1 is not None or c.t2 is not None:
            raise ValueError("t1/t2 apply to the quench scenario only")

        if c.scenario == "calibrate":
            if c.a_grid is None:
                c.a_grid = [round(0.1 * k, 1) for k in range(11)]
            c.a_grid = [float(v) for v in c.a_grid]
            if any(not 0.0 <= v <= 1.0 for v in c.a_grid):
                raise ValueError("a_grid values must lie in [0, 1]")
            if len(c.a_grid) < 2:
                raise ValueError("a_grid needs at least 2 points to fit")
            if c.t_measure is None:
                c.t_measure = 1.0e4
            if c.t_measure <= 0:
                raise ValueError("t_measure must be positive")
            if c.t_max is None and c.time_grid is None:
                c.t_max = c.t_measure
        elif c.a_grid is not None or c.t_measure is not None:
            raise ValueError("a_grid/t_measure apply to calibrate only")

        if c.scenario == "sweep":
            if c.sweep_axis is None:
                c.sweep_axis = "I_AE"
            if c.sweep_axis not in SWEEP_AXES:
                raise ValueError(f"sweep_axis must be one of {SWEEP_AXES}")
            if c.sweep_values is None:
                c.sweep_values = np.geomspace(1e-4, 1.0, 16).tolist()
            c.sweep_values = [float(v) for v in c.sweep_values]
            if any(v < 0 for v in c.sweep_values):
                raise ValueError("sweep_values are magnitudes; "
                                 "signs follow the defaults")
            if c.env_sizes is None:
                c.env_sizes = [8, 10, 12]
            c.env_sizes = [int(n) for n in c.env_sizes]
            if c.t_eval is None:
                c.t_eval = 1.0e3
            if c.t_eval <= 0:
                raise ValueError("t_eval must be positive")
            if c.t_max is None and c.time_grid is None:
                c.t_max = c.t_eval
        elif any(v is not None for v in (c.sweep_axis, c.sweep_values,
                                         c.env_sizes, c.t_eval)):
            raise ValueError("sweep_axis/sweep_values/env_sizes/t_eval "
                             "apply to the sweep scenario only")

        if c.time_grid is None:
            if c.t_max is None:
                c.t_max = DEFAULT_T_MAX[c.scenario]
            c.time_grid = default_time_grid(c.t_max)
        c.time_grid = [float(t) for t in c.time_grid]
        if c.scenario == "quench":
            c.time_grid = _insert_times(c.time_grid, (c.t1, c.t2))
        elif c.scenario == "calibrate":
            c.time_grid = _insert_times(c.time_grid, (c.t_measure,))
        elif c.scenario == "sweep":
            c.time_grid = _insert_times(c.time_grid, (c.t_eval,))
        _check_grid(c.time_grid)
        if c.t_max is None:
            c.t_max = c.time_grid[-1]
        if c.scenario == "quench" and not (c.time_grid[0] <= c.t1
                                           and c.t2 <= c.time_grid[-1]):
            raise ValueError("quench window must lie inside the time grid")
        if c.threads is not None and c.threads < 1:
            raise ValueError("threads must be at least 1")
        return c


def default_time_grid(t_max, n=TIME_GRID_POINTS):
    """{0} followed by n log-spaced samples ending at t_max."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    first = min(GRID_T_FIRST, t_max)
    if first == t_max:
        return [0.0, float(t_max)]
    return [0.0] + np.geomspace(first, t_max, n).tolist()


def _insert_times(grid, extra):
    merged = sorted(set(float(t) for t in grid) | set(float(t) for t in extra))
    return merged


def _check_grid(grid):
    if len(grid) < 2:
        raise ValueError("time grid needs at least 2 points")
    arr = np.asarray(grid, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("time grid must be finite")
    if arr[0] < 0:
        raise ValueError("time grid must start at t >= 0")
    if np.any(np.diff(arr) <= 0):
        raise ValueError("time grid must be strictly increasing")


def config_to_dict(cfg):
    """JSON-ready dict mirroring the dataclass, for meta.json echoes."""
    d = dataclasses.asdict(cfg)
    ham = d.pop("hamiltonian")
    if ham is not None:
        ham.pop("window", None)  # derived from t1/t2, never a config key
        d["hamiltonian"] = ham
    return d


def config_from_dict(data):
    """Build a config from a JSON-shaped dict; unknown keys are an error."""
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    data = dict(data)
    ham = data.pop("hamiltonian", None)
    if ham is not None:
        if not isinstance(ham, dict):
            raise ValueError("hamiltonian must be a JSON object")
        bad = sorted(set(ham) - set(_HAMILTONIAN_KEYS))
        if bad:
            raise ValueError(f"unknown hamiltonian keys: {', '.join(bad)}")
        data["hamiltonian"] = HamiltonianSpec(**ham)
    return ExperimentConfig(**data)


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as err:
            raise ValueError(f"config {path} is not valid JSON: {err}")
    return config_from_dict(data)
