"""Config-driven experiment runners with realization statistics.

Realizations sharing a Hamiltonian are evolved side by side as the columns
of one (dim, B) block, which keeps the hot kernels in their fastest regime;
aggregation over columns is an ordered reduction, so results do not depend
on scheduling.  Every run watches its conserved quantities and raises on
violation rather than emitting corrupt statistics.
"""

import csv
import dataclasses
import json
import os

import numpy as np

from .chebyshev import evolve
from .config import ExperimentConfig, config_to_dict
from .core import SpinLayout
from .hamiltonian import compile_hamiltonian, draw_couplings
from .observables import (check_rdm, coherence, conditional_rdm, correlation,
                          entropy, magnetization, rdm_system_apparatus)
from .states import ReadyStatePrep

# stream labels entering the seed derivation; never renumber, or every
# published result changes
PURPOSE_IDS = {"couplings": 0, "ready": 1}

# conservation budgets enforced at every sample of every run
NORM_TOL = 1e-10
WEIGHT_TOL = 1e-10
ENERGY_TOL = 1e-8

# Table-1 signs reapplied to swept coupling magnitudes
SWEEP_SIGNS = {"I_SA": +1.0, "I_AE": -1.0, "K": -1.0}


def child_seed(master_seed, purpose, *indices):
    """Independent child stream keyed by (master, purpose, indices).

    The key tuple feeds numpy's SeedSequence entropy whole, so distinct
    tuples give distinct, well-mixed streams by construction.
    """
    key = (int(master_seed), PURPOSE_IDS[purpose]) + tuple(
        int(i) for i in indices)
    return np.random.SeedSequence(key)


def _seed_record(purpose, indices, seq):
    return {"purpose": purpose, "indices": [int(i) for i in indices],
            "entropy": [int(v) for v in np.atleast_1d(seq.entropy)]}


@dataclasses.dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float


def linear_fit(x, y):
    """Ordinary least squares line with explained-variance R^2.

    Constant y returns slope 0 and, by convention, R^2 = 0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("need two equal-length 1D arrays of >= 2 points")
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate x grid: all abscissae equal")
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    intercept = float(ym - slope * xm)
    ss_res = float(np.sum((y - slope * x - intercept) ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 0.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(slope, intercept, float(min(max(r2, 0.0), 1.0)))


def aggregate(samples, axis=0):
    """Mean and sample standard deviation (n-1 denominator) along axis.

    A single realization has no scatter estimate: std is identically 0.
    """
    arr = np.asarray(samples, dtype=np.float64)
    mean = arr.mean(axis=axis)
    if arr.shape[axis] > 1:
        std = arr.std(axis=axis, ddof=1)
    else:
        std = np.zeros_like(mean)
    return mean, std


@dataclasses.dataclass
class TimeSeriesResult:
    times: np.ndarray
    mean: dict
    std: dict
    samples: dict  # name -> (n_r, T) array of per-realization values
    config: ExperimentConfig
    child_seeds: list
    telemetry: dict = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class CalibrationResult:
    a_grid: np.ndarray
    correlation: np.ndarray  # means over realizations, per a
    magnetization: np.ndarray
    samples: dict  # name -> (n_a, n_r)
    fits: dict  # name -> FitResult
    config: ExperimentConfig
    child_seeds: list
    telemetry: dict = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class SweepResult:
    coupling_values: np.ndarray  # magnitudes as configured
    env_sizes: np.ndarray
    correlation: np.ndarray  # (n_env, n_values) means, Pauli convention
    correlation_spin: np.ndarray  # same data in spin convention (/4)
    samples: np.ndarray  # (n_env, n_values, n_r), Pauli convention
    config: ExperimentConfig
    child_seeds: list
    telemetry: dict = dataclasses.field(default_factory=dict)


class _Telemetry:
    """Conservation watchdog for one evolution block.

    Besides aborting on violations, it accumulates the worst observed
    drifts in .stats: norm (vs 1), weight (up-branch vs target), sz
    (vs the first sample) and energy (relative, per constant-H segment).
    """

    def __init__(self, ham, weights_up):
        self.ham = ham
        self.w_target = None if weights_up is None else np.asarray(
            weights_up, dtype=np.float64)
        self.regime = None
        self.e_ref = None
        self.sz_ref = None
        self.stats = {"norm": 0.0, "weight": 0.0, "sz": 0.0, "energy": 0.0}

    def _energies(self, block, include_sa):
        h = self.ham.apply(block, include_sa=include_sa)
        e = np.einsum("ib,ib->b", np.conj(block), h).real
        return e + self.ham.constant

    def rebase(self, block, include_sa):
        self.e_ref = self._energies(block, include_sa)
        self.regime = include_sa

    def check(self, block, t, include_sa):
        f = block.view(np.float64)
        ss = np.einsum("ib,ib->b", f, f)
        norms = np.sqrt(ss[0::2] + ss[1::2])
        drift = np.max(np.abs(norms - 1.0))
        self.stats["norm"] = max(self.stats["norm"], float(drift))
        if drift > NORM_TOL:
            raise RuntimeError(
                f"norm drift {drift:.3e} at t={t:g} exceeds {NORM_TOL:g}")
        up = block[1::2, :]
        w_up = np.einsum("ib,ib->b", np.conj(up), up).real
        sz = 2.0 * w_up - (ss[0::2] + ss[1::2])
        if self.sz_ref is None:
            self.sz_ref = sz
        self.stats["sz"] = max(self.stats["sz"],
                               float(np.max(np.abs(sz - self.sz_ref))))
        if self.w_target is not None:
            werr = np.max(np.abs(w_up - self.w_target))
            self.stats["weight"] = max(self.stats["weight"], float(werr))
            if werr > WEIGHT_TOL:
                raise RuntimeError(
                    f"up-branch weight drift {werr:.3e} at t={t:g} "
                    f"exceeds {WEIGHT_TOL:g}; sigma^z_S conservation broken")
        if self.regime is None or include_sa != self.regime:
            self.rebase(block, include_sa)
            return
        e = self._energies(block, include_sa)
        scale = np.maximum(1.0, np.abs(self.e_ref))
        rel = np.max(np.abs(e - self.e_ref) / scale)
        self.stats["energy"] = max(self.stats["energy"], float(rel))
        if rel > ENERGY_TOL:
            raise RuntimeError(
                f"energy drift {rel:.3e} at t={t:g} exceeds {ENERGY_TOL:g} "
                "within a constant-H segment")


def _evolve_sampled(block, ham, grid, observer, weights_up,
                    sample_first=True):
    """Drive a (dim, B) block along grid, sampling at every point.

    observer(i, cols) receives the grid index and per-column 1D views.
    The S-A window, if any, is resolved per segment at its midpoint; the
    grid must contain the window edges so no segment straddles them.
    Returns the final block and the telemetry drift maxima.
    """
    grid = np.asarray(grid, dtype=np.float64)
    windowed = ham.window is not None
    tel = _Telemetry(ham, weights_up)

    def _inc(i):
        if not windowed:
            return True
        return ham.sa_active(0.5 * (grid[i - 1] + grid[i]))

    if sample_first:
        tel.check(block, grid[0], _inc(1) if grid.size > 1 else True)
        observer(0, [block[:, b] for b in range(block.shape[1])])
    for i in range(1, grid.size):
        inc = _inc(i)
        if tel.regime is not None and inc != tel.regime:
            tel.rebase(block, inc)
        dt = grid[i] - grid[i - 1]
        mid = 0.5 * (grid[i] + grid[i - 1])
        if block.shape[1] == 1:
            block = evolve(block[:, 0], ham, dt, t_start=mid)[:, np.newaxis]
        else:
            block = evolve(block, ham, dt, t_start=mid)
        tel.check(block, grid[i], inc)
        observer(i, [block[:, b] for b in range(block.shape[1])])
    return block, tel.stats


def _merge_stats(acc, new):
    for key, val in new.items():
        acc[key] = max(acc.get(key, 0.0), val)
    return acc


def _ready_block(cfg, layout, spec, realization, seeds):
    prep = ReadyStatePrep(spec, layout, realization)
    cols = [prep.build(cfg.a, cfg.ready, cfg.beta, s) for s in seeds]
    return np.ascontiguousarray(np.column_stack(cols))


def _realization_groups(cfg, layout):
    """(hamiltonian, ready-state block, realization indices) work units.

    Couplings are held fixed across the n_r ready-state realizations by
    default; redraw_couplings gives every realization its own glass.
    """
    seeds = []
    records = []
    for k in range(cfg.n_r):
        s = child_seed(cfg.master_seed, "ready", k)
        seeds.append(s)
        records.append(_seed_record("ready", (k,), s))
    groups = []
    if cfg.redraw_couplings:
        for k in range(cfg.n_r):
            cseq = child_seed(cfg.master_seed, "couplings", k)
            records.append(_seed_record("couplings", (k,), cseq))
            realization = draw_couplings(layout, cseq)
            ham = compile_hamiltonian(cfg.hamiltonian, layout, realization)
            block = _ready_block(cfg, layout, cfg.hamiltonian, realization,
                                 [seeds[k]])
            groups.append((ham, block, [k]))
    else:
        cseq = child_seed(cfg.master_seed, "couplings")
        records.append(_seed_record("couplings", (), cseq))
        realization = draw_couplings(layout, cseq)
        ham = compile_hamiltonian(cfg.hamiltonian, layout, realization)
        block = _ready_block(cfg, layout, cfg.hamiltonian, realization, seeds)
        groups.append((ham, block, list(range(cfg.n_r))))
    return groups, records


def _aggregate_timeseries(times, samples, cfg, records, stats):
    mean = {}
    std = {}
    for name, arr in samples.items():
        mean[name], std[name] = aggregate(arr, axis=0)
    return TimeSeriesResult(np.asarray(times), mean, std, samples, cfg,
                            records, stats)


def run_relaxation(cfg):
    """Correlation, coherence magnitude, and magnetization over time."""
    cfg = cfg.resolve()
    if cfg.scenario != "relax":
        raise ValueError("run_relaxation expects scenario 'relax'")
    layout = SpinLayout(cfg.N_A, cfg.N_E)
    grid = np.asarray(cfg.time_grid)
    groups, records = _realization_groups(cfg, layout)
    names = ("correlation", "coherence", "magnetization")
    samples = {n: np.empty((cfg.n_r, grid.size)) for n in names}
    stats = {}

    for ham, block, ks in groups:
        def observer(i, cols):
            for b, psi in enumerate(cols):
                k = ks[b]
                rho = rdm_system_apparatus(psi, layout)
                check_rdm(rho)
                samples["coherence"][k, i] = abs(coherence(rho))
                samples["correlation"][k, i] = correlation(psi, layout)
                samples["magnetization"][k, i] = magnetization(psi, layout)

        _, got = _evolve_sampled(block, ham, grid, observer,
                                 np.full(len(ks), cfg.a))
        _merge_stats(stats, got)
    return _aggregate_timeseries(grid, samples, cfg, records, stats)


def run_entropy(cfg):
    """Entropy of the up-branch apparatus state over time."""
    cfg = cfg.resolve()
    if cfg.scenario != "entropy":
        raise ValueError("run_entropy expects scenario 'entropy'")
    layout = SpinLayout(cfg.N_A, cfg.N_E)
    grid = np.asarray(cfg.time_grid)
    groups, records = _realization_groups(cfg, layout)
    samples = {"entropy": np.empty((cfg.n_r, grid.size))}
    stats = {}

    for ham, block, ks in groups:
        def observer(i, cols):
            for b, psi in enumerate(cols):
                rho = rdm_system_apparatus(psi, layout)
                check_rdm(rho)
                rho_up = conditional_rdm(rho, "up")
                check_rdm(rho_up)
                samples["entropy"][ks[b], i] = entropy(rho_up)

        _, got = _evolve_sampled(block, ham, grid, observer,
                                 np.full(len(ks), cfg.a))
        _merge_stats(stats, got)
    return _aggregate_timeseries(grid, samples, cfg, records, stats)


def run_calibration(cfg):
    """Readout vs preparation weight a, with least-squares calibration fits.

    Each a-grid point gets its own n_r fresh ready-state realizations, so
    the fit sees genuinely independent measurements rather than one random
    environment rigidly shared along the line.
    """
    cfg = cfg.resolve()
    if cfg.scenario != "calibrate":
        raise ValueError("run_calibration expects scenario 'calibrate'")
    layout = SpinLayout(cfg.N_A, cfg.N_E)
    if cfg.redraw_couplings:
        raise ValueError("redraw_couplings is supported for relax and "
                         "entropy scenarios only")
    grid = np.asarray(cfg.time_grid)
    i_measure = int(np.searchsorted(grid, cfg.t_measure))
    if not np.isclose(grid[i_measure], cfg.t_measure):
        raise ValueError("t_measure must be a grid point")
    a_grid = np.asarray(cfg.a_grid)

    records = []
    cseq = child_seed(cfg.master_seed, "couplings")
    records.append(_seed_record("couplings", (), cseq))
    realization = draw_couplings(layout, cseq)
    ham = compile_hamiltonian(cfg.hamiltonian, layout, realization)
    prep = ReadyStatePrep(cfg.hamiltonian, layout, realization)

    cols = []
    targets = []
    for ia, a in enumerate(a_grid):
        for k in range(cfg.n_r):
            s = child_seed(cfg.master_seed, "ready", ia, k)
            records.append(_seed_record("ready", (ia, k), s))
            cols.append(prep.build(a, cfg.ready, cfg.beta, s))
            targets.append(a)
    block = np.ascontiguousarray(np.column_stack(cols))

    n_cols = len(cols)
    corr = np.empty(n_cols)
    mag = np.empty(n_cols)

    def observer(i, col_views):
        if i != i_measure:
            return
        for b, psi in enumerate(col_views):
            corr[b] = correlation(psi, layout)
            mag[b] = magnetization(psi, layout)

    _, stats = _evolve_sampled(block, ham, grid, observer,
                               np.asarray(targets))
    corr = corr.reshape(a_grid.size, cfg.n_r)
    mag = mag.reshape(a_grid.size, cfg.n_r)
    corr_mean, _ = aggregate(corr, axis=1)
    mag_mean, _ = aggregate(mag, axis=1)
    fits = {"magnetization": linear_fit(a_grid, mag_mean),
            "correlation": linear_fit(a_grid, corr_mean)}
    return CalibrationResult(a_grid, corr_mean, mag_mean,
                             {"correlation": corr, "magnetization": mag},
                             fits, cfg, records, stats)


def _order_parameters(psi, layout):
    rho = rdm_system_apparatus(psi, layout)
    check_rdm(rho)
    out = {}
    for branch in ("up", "down"):
        rho_b = conditional_rdm(rho, branch)
        check_rdm(rho_b)
        pop = np.bitwise_count(np.arange(rho_b.shape[0], dtype=np.uint64))
        weights = np.real(np.diag(rho_b))
        out[branch] = float(
            np.dot(weights, 2.0 * pop.astype(np.float64)
                   - layout.n_apparatus) / layout.n_apparatus)
    return out["up"], out["down"]


def run_quench(cfg):
    """Branch order parameters across a finite S-A coupling window.

    The never-coupled twin (control arm) shares every seed and the whole
    pre-window trajectory; it is forked at t1, so the comparison isolates
    the effect of the window itself.
    """
    cfg = cfg.resolve()
    if cfg.scenario != "quench":
        raise ValueError("run_quench expects scenario 'quench'")
    if cfg.redraw_couplings:
        raise ValueError("redraw_couplings is supported for relax and "
                         "entropy scenarios only")
    if not 0.0 < cfg.a < 1.0:
        raise ValueError("quench needs both branches populated: 0 < a < 1")
    layout = SpinLayout(cfg.N_A, cfg.N_E)
    grid = np.asarray(cfg.time_grid)
    i1 = int(np.searchsorted(grid, cfg.t1))
    i2 = int(np.searchsorted(grid, cfg.t2))

    records = []
    cseq = child_seed(cfg.master_seed, "couplings")
    records.append(_seed_record("couplings", (), cseq))
    realization = draw_couplings(layout, cseq)
    ham = compile_hamiltonian(cfg.hamiltonian, layout, realization)
    off_spec = dataclasses.replace(cfg.hamiltonian, I_SA=0.0, window=None)
    ham_off = compile_hamiltonian(off_spec, layout, realization)

    seeds = [child_seed(cfg.master_seed, "ready", k)
             for k in range(cfg.n_r)]
    records += [_seed_record("ready", (k,), s) for k, s in enumerate(seeds)]
    block = _ready_block(cfg, layout, cfg.hamiltonian, realization, seeds)

    names = ["branch_up", "branch_down", "correlation"]
    if cfg.control_arm:
        names += ["control_" + n for n in names]
    samples = {n: np.empty((cfg.n_r, grid.size)) for n in names}

    def make_observer(prefix, offset):
        def observer(i, cols):
            for b, psi in enumerate(cols):
                up, down = _order_parameters(psi, layout)
                samples[prefix + "branch_up"][b, offset + i] = up
                samples[prefix + "branch_down"][b, offset + i] = down
                samples[prefix + "correlation"][b, offset + i] = \
                    correlation(psi, layout)
        return observer

    def mirror(i_from, i_to):
        for n in ("branch_up", "branch_down", "correlation"):
            samples["control_" + n][:, i_from:i_to] = \
                samples[n][:, i_from:i_to]

    weights = np.full(cfg.n_r, cfg.a)
    stats = {}
    # before t1 the window is closed and both arms are the same trajectory
    block, got = _evolve_sampled(block, ham, grid[:i1 + 1],
                                 make_observer("", 0), weights)
    _merge_stats(stats, got)
    if cfg.control_arm:
        mirror(0, i1 + 1)
        ctrl = block.copy()
    # coupling window [t1, t2]
    block, got = _evolve_sampled(block, ham, grid[i1:i2 + 1],
                                 make_observer("", i1), weights,
                                 sample_first=False)
    _merge_stats(stats, got)
    if cfg.control_arm:
        ctrl, got = _evolve_sampled(ctrl, ham_off, grid[i1:i2 + 1],
                                    make_observer("control_", i1), weights,
                                    sample_first=False)
        _merge_stats(stats, got)
    # after t2 both arms run coupling-free again
    block, got = _evolve_sampled(block, ham, grid[i2:],
                                 make_observer("", i2), weights,
                                 sample_first=False)
    _merge_stats(stats, got)
    if cfg.control_arm:
        ctrl, got = _evolve_sampled(ctrl, ham_off, grid[i2:],
                                    make_observer("control_", i2), weights,
                                    sample_first=False)
        _merge_stats(stats, got)

    for prefix in ("", "control_") if cfg.control_arm else ("",):
        samples[prefix + "separation"] = (samples[prefix + "branch_up"]
                                          - samples[prefix + "branch_down"])
    return _aggregate_timeseries(grid, samples, cfg, records, stats)


def run_window_sweep(cfg):
    """Correlation at t_eval over a coupling-magnitude x N_E grid."""
    cfg = cfg.resolve()
    if cfg.scenario != "sweep":
        raise ValueError("run_window_sweep expects scenario 'sweep'")
    if cfg.redraw_couplings:
        raise ValueError("redraw_couplings is supported for relax and "
                         "entropy scenarios only")
    grid = np.asarray(cfg.time_grid)
    i_eval = int(np.searchsorted(grid, cfg.t_eval))
    if not np.isclose(grid[i_eval], cfg.t_eval):
        raise ValueError("t_eval must be a grid point")
    values = np.asarray(cfg.sweep_values)
    env_sizes = np.asarray(cfg.env_sizes, dtype=np.int64)
    sign = SWEEP_SIGNS[cfg.sweep_axis]

    records = []
    stats = {}
    samples = np.empty((env_sizes.size, values.size, cfg.n_r))
    for ie, n_env in enumerate(env_sizes):
        layout = SpinLayout(cfg.N_A, int(n_env))
        cseq = child_seed(cfg.master_seed, "couplings", ie)
        records.append(_seed_record("couplings", (ie,), cseq))
        realization = draw_couplings(layout, cseq)
        seeds = [child_seed(cfg.master_seed, "ready", ie, k)
                 for k in range(cfg.n_r)]
        records += [_seed_record("ready", (ie, k), s)
                    for k, s in enumerate(seeds)]
        for iv, val in enumerate(values):
            spec = dataclasses.replace(cfg.hamiltonian,
                                       **{cfg.sweep_axis: sign * val})
            ham = compile_hamiltonian(spec, layout, realization)
            block = _ready_block(cfg, layout, spec, realization, seeds)
            got = np.empty(cfg.n_r)

            def observer(i, cols):
                if i != i_eval:
                    return
                for b, psi in enumerate(cols):
                    got[b] = correlation(psi, layout)

            _, drift = _evolve_sampled(block, ham, grid, observer,
                                       np.full(cfg.n_r, cfg.a))
            _merge_stats(stats, drift)
            samples[ie, iv, :] = got
    mean, _ = aggregate(samples, axis=2)
    # main-text curves use Pauli operators; the coupling-window analysis
    # uses spin operators, a factor of 4 smaller
    return SweepResult(values, env_sizes, mean, mean / 4.0, samples, cfg,
                       records, stats)


RUNNERS = {"relax": run_relaxation, "entropy": run_entropy,
           "calibrate": run_calibration, "quench": run_quench,
           "sweep": run_window_sweep}


def run_experiment(cfg):
    cfg = cfg.resolve()
    return RUNNERS[cfg.scenario](cfg)


def _fmt(x):
    return f"{float(x):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _write_meta(out_dir, cfg, child_seeds, extra=None):
    from . import __version__
    meta = {"version": __version__,
            "config": config_to_dict(cfg),
            "child_seeds": child_seeds}
    if extra:
        meta.update(extra)
    path = os.path.join(out_dir, "meta.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def emit(result, out_dir):
    """Write one CSV per observable plus meta.json; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if isinstance(result, TimeSeriesResult):
        for name in sorted(result.mean):
            path = os.path.join(out_dir, f"{name}.csv")
            rows = zip(result.times, result.mean[name], result.std[name])
            _write_csv(path, ("t", "mean", "std"), rows)
            paths.append(path)
        paths.append(_write_meta(out_dir, result.config, result.child_seeds,
                                 {"telemetry": result.telemetry}))
    elif isinstance(result, CalibrationResult):
        path = os.path.join(out_dir, "calibration.csv")
        rows = zip(result.a_grid, result.correlation, result.magnetization)
        _write_csv(path, ("a", "corr", "mag"), rows)
        paths.append(path)
        fits = {name: dataclasses.asdict(fit)
                for name, fit in result.fits.items()}
        paths.append(_write_meta(out_dir, result.config, result.child_seeds,
                                 {"fits": fits,
                                  "telemetry": result.telemetry}))
    elif isinstance(result, SweepResult):
        for suffix, table in (("pauli", result.correlation),
                              ("spin", result.correlation_spin)):
            path = os.path.join(out_dir, f"sweep_{suffix}.csv")
            rows = [(v, n, table[ie, iv])
                    for ie, n in enumerate(result.env_sizes)
                    for iv, v in enumerate(result.coupling_values)]
            _write_csv(path, ("coupling", "n_env", "corr"), rows)
            paths.append(path)
        paths.append(_write_meta(out_dir, result.config, result.child_seeds,
                                 {"telemetry": result.telemetry}))
    else:
        raise TypeError(f"cannot emit {type(result).__name__}")
    return paths
