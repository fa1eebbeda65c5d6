"""Command-line front end.

Subcommands: window, dist, sample, crb, estimate, experiment.  Record
length is given either as --qubits M (N = 2^M) or directly as
--record-length N; non-power-of-two lengths need --allow-any-n.  Phases
are entered as --phase-frac x (phi = 2*pi*x) or --phase-rad r.  Exit
codes: 0 success, 1 runtime error, 2 argument error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .angles import TWO_PI, wrap_two_pi
from .estimators import (
    DEFAULT_CONFIG,
    EstimatorConfig,
    aml_estimate,
    circular_sample_mean,
    dual_frequency_details,
)
from .experiments import (
    EXPERIMENT_KINDS,
    ExperimentSpec,
    run_experiment,
)
from .io import (
    distribution_to_csv,
    read_sample_set_json,
    sample_set_to_json,
    table_to_csv,
    table_to_json,
    write_csv,
    write_json,
)
from .model import distribution, histogram, sample
from .windows import WINDOW_KINDS, load_weights_csv, make_window

THREADS_ENV = "PHASEKIT_THREADS"


class CliError(Exception):
    """Argument-level error detected after parsing; maps to exit code 2."""


def main() -> None:
    sys.exit(dispatch())


def dispatch(argv=None) -> int:
    """Parse argv, run the subcommand, return the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasekit",
        description="Windowed phase-estimation statistics, bounds and estimators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("window", help="emit window weights")
    _add_length_args(p)
    _add_window_args(p)
    _add_output_args(p)
    p.set_defaults(func=_cmd_window)

    p = sub.add_parser("dist", help="emit the exact outcome distribution")
    _add_length_args(p)
    _add_window_args(p)
    _add_phase_args(p, required=True)
    p.add_argument("--offset-half-cell", action="store_true",
                   help="apply the pi/N frequency offset")
    _add_output_args(p)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("sample", help="draw seeded measurement outcomes")
    _add_length_args(p)
    _add_window_args(p)
    _add_phase_args(p, required=True)
    p.add_argument("--offset-half-cell", action="store_true")
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_output_args(p, default_format="json")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("crb", help="average square-root CRB curves")
    _add_length_args(p, many=True)
    p.add_argument("--windows", default="rect,cosine,bartlett",
                   help="comma-separated window ids")
    p.add_argument("--shots-list", default="1", help="comma-separated shot counts")
    p.add_argument("--grid-size", type=int, default=256)
    _add_output_args(p)
    p.set_defaults(func=_cmd_crb)

    p = sub.add_parser("estimate", help="run an estimator on stored sample sets")
    p.add_argument("--estimator", choices=("mean", "aml", "df"), required=True)
    p.add_argument("--input", action="append", required=True,
                   help="sample-set JSON or histogram CSV (twice for df)")
    p.add_argument("--offset-half-cell", action="store_true",
                   help="declare a pi/N offset for CSV inputs, which carry none")
    p.add_argument("--bins-kept", type=int, default=DEFAULT_CONFIG.bins_kept)
    p.add_argument("--grid-points", type=int, default=None)
    _add_output_args(p, default_format="json")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("experiment", help="run a Monte-Carlo experiment")
    p.add_argument("kind", nargs="?", choices=EXPERIMENT_KINDS)
    _add_length_args(p, many=True)
    p.add_argument("--shots-list", default="30")
    p.add_argument("--estimators", default="df")
    p.add_argument("--windows", default="rect,cosine,bartlett")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phase-policy", choices=("uniform", "cell"), default="uniform")
    p.add_argument("--cell", type=int, default=0, help="cell index for the cell policy")
    p.add_argument("--cell-units", action="store_true",
                   help="report scatter errors in units of 2*pi/N")
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get(THREADS_ENV, "1")))
    p.add_argument("--plot-data", action="store_true",
                   help="emit the standard figure bundle instead of one run")
    p.add_argument("--out-dir", default=".")
    _add_output_args(p)
    p.set_defaults(func=_cmd_experiment)

    return parser


def _add_length_args(p, many: bool = False):
    group = p.add_mutually_exclusive_group(required=True)
    if many:
        group.add_argument("--qubits", help="qubit count(s), comma-separated")
        group.add_argument("--record-length", help="record length(s), comma-separated")
    else:
        group.add_argument("--qubits", type=int)
        group.add_argument("--record-length", type=int)
    p.add_argument("--allow-any-n", action="store_true",
                   help="permit record lengths that are not powers of two")


def _add_window_args(p):
    p.add_argument("--window", choices=WINDOW_KINDS, default="rect")
    p.add_argument("--weights-csv", help="one-column CSV for --window custom")


def _add_phase_args(p, required: bool):
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument("--phase-frac", type=float, help="phase as a fraction of 2*pi")
    group.add_argument("--phase-rad", type=float, help="phase in radians")


def _add_output_args(p, default_format: str = "csv"):
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--output", help="output path (default: stdout)")


def _resolve_n(args) -> int:
    if args.qubits is not None:
        if args.qubits < 1:
            raise CliError("--qubits must be >= 1")
        return 2 ** args.qubits
    return _check_length(args.record_length, args.allow_any_n)


def _resolve_n_list(args) -> list[int]:
    if args.qubits is not None:
        qubits = [int(q) for q in str(args.qubits).split(",")]
        if any(q < 1 for q in qubits):
            raise CliError("--qubits must be >= 1")
        return [2 ** q for q in qubits]
    return [_check_length(int(n), args.allow_any_n)
            for n in str(args.record_length).split(",")]


def _check_length(n: int, allow_any: bool) -> int:
    if n < 2:
        raise CliError("record length must be >= 2")
    if n & (n - 1) != 0 and not allow_any:
        raise CliError(f"record length {n} is not a power of two (use --allow-any-n)")
    return n


def _resolve_phase(args) -> float:
    if args.phase_frac is not None:
        return wrap_two_pi(TWO_PI * args.phase_frac)
    return wrap_two_pi(args.phase_rad)


def _resolve_window(args, n: int):
    if args.window == "custom":
        if not args.weights_csv:
            raise CliError("--window custom requires --weights-csv")
        return make_window("custom", weights=load_weights_csv(args.weights_csv))
    return make_window(args.window, n)


def _emit(args, csv_text: str | None = None, json_text: str | None = None) -> int:
    text = csv_text if args.format == "csv" else json_text
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_window(args) -> int:
    n = _resolve_n(args)
    window = _resolve_window(args, n)
    rows = list(enumerate(window.weights))
    return _emit(
        args,
        csv_text=write_csv(["y", "value"], rows),
        json_text=write_json({"kind": window.kind, "n_points": window.n_points},
                             [{"y": y, "value": float(w)} for y, w in rows]),
    )


def _cmd_dist(args) -> int:
    n = _resolve_n(args)
    window = _resolve_window(args, n)
    offset = np.pi / n if args.offset_half_cell else 0.0
    dist = distribution(window, _resolve_phase(args), offset)
    spec = {"n_points": n, "window": window.kind, "phase": dist.phase, "offset": dist.offset}
    rows = [{"y": y, "value": float(p)} for y, p in enumerate(dist.probs)]
    return _emit(args, csv_text=distribution_to_csv(dist),
                 json_text=write_json(spec, rows))


def _cmd_sample(args) -> int:
    n = _resolve_n(args)
    window = _resolve_window(args, n)
    offset = np.pi / n if args.offset_half_cell else 0.0
    if args.shots < 1:
        raise CliError("--shots must be >= 1")
    print(f"seed: {args.seed}", file=sys.stderr)
    dist = distribution(window, _resolve_phase(args), offset)
    draws = sample(dist, args.shots, args.seed)
    hist = histogram(draws)
    return _emit(
        args,
        csv_text=write_csv(["y", "value"], list(enumerate(hist.counts))),
        json_text=sample_set_to_json(draws),
    )


def _cmd_crb(args) -> int:
    n_list = _resolve_n_list(args)
    shots = [int(s) for s in args.shots_list.split(",")]
    spec = ExperimentSpec(
        kind="crb-curve",
        n_points=tuple(n_list),
        n_shots=tuple(shots),
        windows=tuple(args.windows.split(",")),
        trials=1,
        allow_any_n=args.allow_any_n,
        crb_grid_size=args.grid_size,
    )
    table = run_experiment(spec)
    return _emit(args, csv_text=table_to_csv(table), json_text=table_to_json(table))


def _cmd_estimate(args) -> int:
    config = EstimatorConfig(bins_kept=args.bins_kept, grid_points=args.grid_points)
    sets = [_load_sample_set(path, args.offset_half_cell) for path in args.input]
    if args.estimator == "df":
        if len(sets) != 2:
            raise CliError("df estimation needs exactly two --input files")
        details = dual_frequency_details(sets[0], sets[1], config)
        payload = {
            "estimator": "df",
            "estimate": details.estimate,
            "candidates": [float(u) for u in details.candidates.u],
            "matched_pair": list(details.matched_pair),
            "set1": {"rough": details.aml_set1.rough,
                     "correction": details.aml_set1.correction},
            "set2": {"rough": details.aml_set2.rough,
                     "correction": details.aml_set2.correction},
        }
    elif args.estimator == "aml":
        if len(sets) != 1:
            raise CliError("aml estimation takes exactly one --input file")
        result = aml_estimate(histogram(sets[0]), sets[0].offset, config)
        payload = {
            "estimator": "aml",
            "estimate": float(wrap_two_pi(result.refined - sets[0].offset)),
            "rough": result.rough,
            "refined": result.refined,
            "correction": result.correction,
        }
    else:
        if len(sets) != 1:
            raise CliError("mean estimation takes exactly one --input file")
        payload = {"estimator": "mean", "estimate": circular_sample_mean(sets[0])}
    text = write_json(payload, [])
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_experiment(args) -> int:
    if args.plot_data:
        return _emit_plot_bundle(args)
    if args.kind is None:
        raise CliError("provide an experiment kind or --plot-data")
    print(f"seed: {args.seed}", file=sys.stderr)
    spec = _experiment_spec(args, args.kind)
    table = run_experiment(spec)
    if args.kind == "scatter" and args.cell_units:
        table = _rescale_scatter(table)
    return _emit(args, csv_text=table_to_csv(table), json_text=table_to_json(table))


def _experiment_spec(args, kind: str, **overrides) -> ExperimentSpec:
    base = dict(
        kind=kind,
        n_points=tuple(_resolve_n_list(args)),
        n_shots=tuple(int(s) for s in args.shots_list.split(",")),
        estimators=tuple(args.estimators.split(",")),
        windows=tuple(args.windows.split(",")),
        trials=args.trials,
        master_seed=args.seed,
        phase_policy=args.phase_policy,
        cell_index=args.cell,
        allow_any_n=args.allow_any_n,
        n_jobs=max(1, args.threads),
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def _load_sample_set(path, offset_half_cell: bool):
    """Sample set from JSON, or expanded from a histogram CSV."""
    if str(path).endswith(".csv"):
        from .io import read_histogram_csv
        from .model import SampleSet

        hist = read_histogram_csv(path)
        outcomes = np.repeat(np.arange(hist.n_points), hist.counts)
        offset = np.pi / hist.n_points if offset_half_cell else 0.0
        return SampleSet(hist.n_points, outcomes, offset=offset)
    return read_sample_set_json(path)


def _rescale_scatter(table):
    from .experiments import ScatterRow, ScatterTable

    n = table.spec.n_points[0]
    scale = n / TWO_PI
    rows = [ScatterRow(r.true_phase, r.signed_error * scale) for r in table.rows]
    return ScatterTable(table.spec, rows)


def _emit_plot_bundle(args) -> int:
    """Write fig3.csv ... fig7.csv: CRB curves, scatter runs and RMSE sweeps."""
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    print(f"seed: {args.seed}", file=sys.stderr)
    shots_sweep = (2, 4, 8, 16, 30, 50, 70, 100)

    def spec(kind, **kw):
        merged = dict(
            kind=kind, n_points=(128,), n_shots=shots_sweep,
            estimators=("df", "mean-cosine"), windows=("rect", "cosine", "bartlett"),
            trials=args.trials, master_seed=args.seed, phase_policy="uniform",
            cell_index=args.cell, allow_any_n=True, n_jobs=max(1, args.threads),
        )
        merged.update(kw)
        return ExperimentSpec(**merged)

    # fig3: sqrt-CRB vs shots for each window, with sample-mean RMSE overlay
    crb_table = run_experiment(spec("crb-curve", n_shots=(1,) + shots_sweep))
    mean_table = run_experiment(spec(
        "rmse-vs-shots", estimators=("mean-rect", "mean-cosine", "mean-bartlett")))
    rmse_by_key = {(r.window, r.n_shots): r.rmse for r in mean_table.rows}
    fig3_rows = [
        (int(r.x), r.window, r.sqrt_crb, rmse_by_key.get((r.window, int(r.x)), ""))
        for r in crb_table.rows
    ]
    write_csv(["n_shots", "window", "sqrt_crb", "rmse_sample_mean"],
              fig3_rows, out_dir / "fig3.csv")

    # fig4 / fig7: estimator error scatter across one cell at N = 100
    for name, estimator in (("fig4.csv", "aml"), ("fig7.csv", "df")):
        table = run_experiment(spec(
            "scatter", n_points=(100,), n_shots=(30,), estimators=(estimator,),
            phase_policy="cell", cell_index=10))
        if args.cell_units:
            table = _rescale_scatter(table)
        table_to_csv(table, out_dir / name)

    # fig5: RMSE vs shots, dual-frequency against the cosine sample mean
    table_to_csv(run_experiment(spec("rmse-vs-shots")), out_dir / "fig5.csv")

    # fig6: RMSE vs record length at a fixed shot count
    table_to_csv(run_experiment(spec(
        "rmse-vs-n", n_points=(64, 128, 256, 512, 1024), n_shots=(30,),
        estimators=("df", "aml", "mean-cosine", "mean-rect"))), out_dir / "fig6.csv")

    for name in ("fig3.csv", "fig4.csv", "fig5.csv", "fig6.csv", "fig7.csv"):
        print(f"wrote {out_dir / name}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    main()
