import numpy as np
import pytest

from phasekit.experiments import (
    ExperimentRow,
    ExperimentSpec,
    fit_loglog_slope,
    run_crb_curve,
    run_experiment,
    run_rmse_vs_n,
    run_rmse_vs_shots,
    run_scatter,
)
from phasekit.io import table_to_csv, table_to_json
from phasekit.rng import derive_seed, splitmix64


def small_spec(**kw):
    base = dict(kind="rmse-vs-shots", n_points=(64,), n_shots=(8, 16),
                estimators=("df", "mean-cosine"), trials=200, master_seed=7)
    base.update(kw)
    return ExperimentSpec(**base)


def test_spec_validation():
    with pytest.raises(ValueError):
        small_spec(kind="nope")
    with pytest.raises(ValueError):
        small_spec(n_points=())
    with pytest.raises(ValueError):
        small_spec(estimators=("magic",))
    with pytest.raises(ValueError):
        small_spec(n_points=(100,))  # not a power of two
    small_spec(n_points=(100,), allow_any_n=True)
    with pytest.raises(ValueError):
        small_spec(phase_policy="fixed")
    small_spec(phase_policy="fixed", fixed_phases=(0.3,))


def test_row_count_invariant():
    table = run_rmse_vs_shots(small_spec(trials=50))
    assert len(table.rows) == 1 * 2 * 2
    assert all(r.rmse >= 0 and r.sqrt_crb > 0 for r in table.rows)


def test_errors_are_wrapped():
    spec = small_spec(kind="scatter", n_points=(64,), n_shots=(8,),
                      estimators=("df",), trials=100, phase_policy="cell", cell_index=5)
    table = run_scatter(spec)
    assert len(table.rows) == 100
    assert all(abs(r.signed_error) <= np.pi for r in table.rows)
    cell_lo = 2 * np.pi * 5 / 64
    assert all(cell_lo <= r.true_phase < cell_lo + 2 * np.pi / 64 for r in table.rows)


def test_scatter_zero_trials_empty():
    spec = small_spec(kind="scatter", n_points=(64,), n_shots=(8,),
                      estimators=("aml",), trials=0, phase_policy="cell")
    assert run_scatter(spec).rows == []


def test_rerun_is_identical():
    spec = small_spec()
    a = run_rmse_vs_shots(spec)
    b = run_rmse_vs_shots(spec)
    assert [(r.rmse, r.sqrt_crb) for r in a.rows] == [(r.rmse, r.sqrt_crb) for r in b.rows]


def test_worker_count_does_not_change_bytes():
    texts = []
    for jobs in (1, 3):
        spec = small_spec(trials=120, n_jobs=jobs)
        texts.append(table_to_csv(run_rmse_vs_shots(spec)))
    assert texts[0] == texts[1]


def test_fixed_phase_policy():
    spec = small_spec(kind="scatter", n_points=(64,), n_shots=(8,), estimators=("aml",),
                      trials=10, phase_policy="fixed", fixed_phases=(1.0, 2.0))
    phases = [r.true_phase for r in run_scatter(spec).rows]
    assert phases == [1.0, 2.0] * 5


def test_crb_curve_rows():
    spec = ExperimentSpec(kind="crb-curve", n_points=(128,), n_shots=(1, 10, 100),
                          windows=("rect", "cosine"), trials=1)
    table = run_crb_curve(spec)
    assert len(table.rows) == 6
    rect = {r.x: r.sqrt_crb for r in table.rows if r.window == "rect"}
    assert rect[100.0] == pytest.approx(rect[1.0] / 10, rel=1e-12)


def test_run_experiment_dispatch():
    spec = small_spec(trials=20)
    assert run_experiment(spec).rows
    with pytest.raises(ValueError):
        run_rmse_vs_n(spec)  # wrong kind for this runner


def test_fit_loglog_slope_synthetic():
    rows = [ExperimentRow(64, ns, "rect", "df", 3.0 / ns, 0.1, 10, 0.0)
            for ns in (2, 4, 8, 16, 32)]
    assert fit_loglog_slope(rows, "n_shots") == pytest.approx(-1.0, abs=1e-12)
    rows = [ExperimentRow(64, ns, "rect", "df", 3.0 / np.sqrt(ns), 0.1, 10, 0.0)
            for ns in (2, 4, 8, 16, 32)]
    assert fit_loglog_slope(rows, "n_shots") == pytest.approx(-0.5, abs=1e-12)


def test_fit_loglog_slope_validation():
    rows = [ExperimentRow(64, 2, "rect", "df", 1.0, 0.1, 10, 0.0)]
    with pytest.raises(ValueError):
        fit_loglog_slope(rows, "n_shots")
    bad = [ExperimentRow(64, ns, "rect", "df", 0.0, 0.1, 10, 0.0) for ns in (2, 4, 8)]
    with pytest.raises(ValueError):
        fit_loglog_slope(bad, "n_shots")


def test_fit_loglog_slope_filtering():
    rows = [ExperimentRow(64, ns, "rect", "df", 1.0 / ns, 0.1, 10, 0.0) for ns in (2, 4, 8)]
    rows += [ExperimentRow(64, ns, "cosine", "mean-cosine", 5.0, 0.1, 10, 0.0)
             for ns in (2, 4, 8)]
    assert fit_loglog_slope(rows, "n_shots", {"estimator": "df"}) == pytest.approx(-1.0)


def test_seed_derivation_mixing():
    a = derive_seed(7, "rmse-vs-shots", "df", 64, 8, 0)
    b = derive_seed(7, "rmse-vs-shots", "df", 64, 8, 1)
    c = derive_seed(8, "rmse-vs-shots", "df", 64, 8, 0)
    assert len({a, b, c}) == 3
    assert splitmix64(0) != 0
    assert all(0 <= s < 2**64 for s in (a, b, c))


def test_json_emission_shape():
    table = run_rmse_vs_shots(small_spec(trials=20))
    import json

    payload = json.loads(table_to_json(table))
    assert set(payload) == {"spec", "rows"}
    assert payload["spec"]["kind"] == "rmse-vs-shots"
    assert len(payload["rows"]) == 4
    assert "wall_time" not in payload["rows"][0]
