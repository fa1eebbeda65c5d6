"""Seeded Monte-Carlo harness: RMSE sweeps, scatter runs, CRB curves.

Every trial draws its own generator from a seed derived as
derive_seed(master_seed, kind, estimator, N, N_s, trial_index), so tables
are bit-identical no matter how trials are scheduled across workers.
Per-trial squared errors are aggregated with numpy's pairwise summation
over the trial-indexed array, which fixes the reduction order.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .angles import TWO_PI, circ_signed_error
from .estimators import (
    DEFAULT_CONFIG,
    aml_estimate,
    circular_sample_mean,
    dual_frequency_estimate,
    split_shot_counts,
)
from .fisher import avg_sqrt_crb
from .model import distribution, histogram, sample_with_rng
from .rng import derive_seed, make_generator
from .windows import make_window

EXPERIMENT_KINDS = ("rmse-vs-shots", "rmse-vs-n", "scatter", "crb-curve")

# Data window backing each estimator; the same window prices its CRB column.
ESTIMATOR_WINDOWS = {
    "mean-rect": "rect",
    "mean-cosine": "cosine",
    "mean-bartlett": "bartlett",
    "aml": "rect",
    "df": "rect",
}

PHASE_POLICIES = ("uniform", "cell", "fixed")


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one experiment run."""

    kind: str
    n_points: tuple[int, ...]
    n_shots: tuple[int, ...]
    estimators: tuple[str, ...] = ("df",)
    windows: tuple[str, ...] = ("rect", "cosine", "bartlett")  # crb-curve only
    trials: int = 10_000
    master_seed: int = 0
    phase_policy: str = "uniform"
    cell_index: int = 0
    fixed_phases: tuple[float, ...] = ()
    allow_any_n: bool = False
    crb_grid_size: int = 256
    n_jobs: int = 1

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if not self.n_points or not self.n_shots:
            raise ValueError("n_points and n_shots lists must be nonempty")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if self.phase_policy not in PHASE_POLICIES:
            raise ValueError(f"unknown phase policy {self.phase_policy!r}")
        if self.phase_policy == "fixed" and not self.fixed_phases:
            raise ValueError("fixed phase policy needs fixed_phases")
        for est in self.estimators:
            if est not in ESTIMATOR_WINDOWS:
                raise ValueError(f"unknown estimator {est!r}")
        for n in self.n_points:
            if n < 2:
                raise ValueError("record length must be >= 2")
            if not self.allow_any_n and n & (n - 1) != 0:
                raise ValueError(
                    f"record length {n} is not a power of two (set allow_any_n to override)"
                )
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be >= 1")


@dataclass(frozen=True)
class ExperimentRow:
    n_points: int
    n_shots: int
    window: str
    estimator: str
    rmse: float
    sqrt_crb: float
    trials: int
    wall_time: float


@dataclass(frozen=True)
class ScatterRow:
    true_phase: float
    signed_error: float


@dataclass(frozen=True)
class CrbRow:
    x: float
    window: str
    sqrt_crb: float


@dataclass(frozen=True)
class ExperimentTable:
    spec: ExperimentSpec
    rows: list[ExperimentRow] = field(default_factory=list)


@dataclass(frozen=True)
class ScatterTable:
    spec: ExperimentSpec
    rows: list[ScatterRow] = field(default_factory=list)


@dataclass(frozen=True)
class CrbTable:
    spec: ExperimentSpec
    rows: list[CrbRow] = field(default_factory=list)


def run_rmse_vs_shots(spec: ExperimentSpec) -> ExperimentTable:
    """RMSE per (N_s, estimator) at fixed record length(s)."""
    if spec.kind != "rmse-vs-shots":
        raise ValueError("spec.kind must be 'rmse-vs-shots'")
    return _run_rmse(spec)


def run_rmse_vs_n(spec: ExperimentSpec) -> ExperimentTable:
    """RMSE per (N, estimator) at fixed shot count(s)."""
    if spec.kind != "rmse-vs-n":
        raise ValueError("spec.kind must be 'rmse-vs-n'")
    return _run_rmse(spec)


def run_scatter(spec: ExperimentSpec) -> ScatterTable:
    """One (true_phase, signed_error) row per trial, single (N, N_s, estimator)."""
    if spec.kind != "scatter":
        raise ValueError("spec.kind must be 'scatter'")
    if len(spec.n_points) != 1 or len(spec.n_shots) != 1 or len(spec.estimators) != 1:
        raise ValueError("scatter runs take exactly one N, one N_s and one estimator")
    if spec.trials == 0:
        return ScatterTable(spec, [])
    n, n_shots, estimator = spec.n_points[0], spec.n_shots[0], spec.estimators[0]
    phases, errors = _collect_trials(spec, estimator, n, n_shots)
    rows = [ScatterRow(float(p), float(e)) for p, e in zip(phases, errors)]
    return ScatterTable(spec, rows)


def run_crb_curve(spec: ExperimentSpec) -> CrbTable:
    """Average square-root CRB per (window, N or N_s)."""
    if spec.kind != "crb-curve":
        raise ValueError("spec.kind must be 'crb-curve'")
    vary_n = len(spec.n_points) > 1 and len(spec.n_shots) == 1
    rows = []
    for n in spec.n_points:
        for window_id in spec.windows:
            one_shot = avg_sqrt_crb(make_window(window_id, n), 1, spec.crb_grid_size)
            for n_shots in spec.n_shots:
                x = float(n) if vary_n else float(n_shots)
                rows.append(CrbRow(x, window_id, one_shot / np.sqrt(n_shots)))
    return CrbTable(spec, rows)


def run_experiment(spec: ExperimentSpec):
    """Dispatch on spec.kind."""
    runner = {
        "rmse-vs-shots": run_rmse_vs_shots,
        "rmse-vs-n": run_rmse_vs_n,
        "scatter": run_scatter,
        "crb-curve": run_crb_curve,
    }[spec.kind]
    return runner(spec)


def fit_loglog_slope(table, x_field: str, where: dict | None = None) -> float:
    """OLS slope of log(rmse) against log(x_field) over the filtered rows."""
    rows = table.rows if hasattr(table, "rows") else list(table)
    if where:
        rows = [r for r in rows if all(getattr(r, k) == v for k, v in where.items())]
    if len(rows) < 3:
        raise ValueError("need at least 3 rows to fit a slope")
    xs = np.array([float(getattr(r, x_field)) for r in rows])
    ys = np.array([r.rmse for r in rows])
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit requires positive values")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def _run_rmse(spec: ExperimentSpec) -> ExperimentTable:
    if spec.trials < 1:
        raise ValueError("RMSE experiments need at least one trial")
    rows = []
    crb_cache: dict[tuple[str, int], float] = {}
    for n in spec.n_points:
        for n_shots in spec.n_shots:
            for estimator in spec.estimators:
                start = time.perf_counter()
                window_id = ESTIMATOR_WINDOWS[estimator]
                _, errors = _collect_trials(spec, estimator, n, n_shots)
                rmse = float(np.sqrt(np.sum(errors * errors) / spec.trials))
                key = (window_id, n)
                if key not in crb_cache:
                    crb_cache[key] = avg_sqrt_crb(make_window(window_id, n), 1, spec.crb_grid_size)
                sqrt_crb = float(crb_cache[key] / np.sqrt(n_shots))
                rows.append(ExperimentRow(
                    n_points=n,
                    n_shots=n_shots,
                    window=window_id,
                    estimator=estimator,
                    rmse=rmse,
                    sqrt_crb=sqrt_crb,
                    trials=spec.trials,
                    wall_time=time.perf_counter() - start,
                ))
    return ExperimentTable(spec, rows)


def _collect_trials(spec: ExperimentSpec, estimator: str, n: int, n_shots: int):
    """(true_phases, signed_errors) arrays indexed by trial, scheduling-independent."""
    phases = np.empty(spec.trials)
    errors = np.empty(spec.trials)
    if spec.n_jobs == 1 or spec.trials < 2 * spec.n_jobs:
        chunks = [(0, spec.trials)]
        results = [_trial_chunk(spec, estimator, n, n_shots, 0, spec.trials)]
    else:
        bounds = np.linspace(0, spec.trials, 4 * spec.n_jobs + 1, dtype=int)
        chunks = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=spec.n_jobs) as pool:
            results = list(pool.map(
                _trial_chunk_star,
                [(spec, estimator, n, n_shots, lo, hi) for lo, hi in chunks],
            ))
    for (lo, hi), (chunk_phases, chunk_errors) in zip(chunks, results):
        phases[lo:hi] = chunk_phases
        errors[lo:hi] = chunk_errors
    return phases, errors


def _trial_chunk_star(args):
    return _trial_chunk(*args)


def _trial_chunk(spec: ExperimentSpec, estimator: str, n: int, n_shots: int,
                 lo: int, hi: int):
    window = make_window(ESTIMATOR_WINDOWS[estimator], n)
    phases = np.empty(hi - lo)
    errors = np.empty(hi - lo)
    for i in range(lo, hi):
        rng = make_generator(derive_seed(spec.master_seed, spec.kind, estimator, n, n_shots, i))
        phase = _draw_phase(spec, n, i, rng)
        estimate = _single_trial(estimator, window, n, n_shots, phase, rng)
        phases[i - lo] = phase
        errors[i - lo] = circ_signed_error(estimate, phase)
    return phases, errors


def _draw_phase(spec: ExperimentSpec, n: int, trial_index: int, rng) -> float:
    if spec.phase_policy == "uniform":
        return float(rng.random() * TWO_PI)
    if spec.phase_policy == "cell":
        frac = (trial_index + rng.random()) / spec.trials
        return float(TWO_PI * (spec.cell_index + frac) / n)
    return float(spec.fixed_phases[trial_index % len(spec.fixed_phases)])


def _single_trial(estimator: str, window, n: int, n_shots: int, phase: float, rng) -> float:
    if estimator.startswith("mean-"):
        draws = sample_with_rng(distribution(window, phase), n_shots, rng)
        return circular_sample_mean(draws)
    if estimator == "aml":
        draws = sample_with_rng(distribution(window, phase), n_shots, rng)
        return aml_estimate(histogram(draws), 0.0, DEFAULT_CONFIG).refined
    if estimator == "df":
        first, second = split_shot_counts(n_shots)
        set1 = sample_with_rng(distribution(window, phase, 0.0), first, rng)
        set2 = sample_with_rng(distribution(window, phase, np.pi / n), second, rng)
        return dual_frequency_estimate(set1, set2, DEFAULT_CONFIG)
    raise ValueError(f"unknown estimator {estimator!r}")
