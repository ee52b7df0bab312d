"""Command-line front end: quantizer design tables, Monte Carlo sweeps with
CSV + figure output, and the oracle validation suite."""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

import ampcs
from ampcs.errors import ParameterError, StructureError
from ampcs.model import SystemParams, snr_to_sigma_v
from ampcs.montecarlo import (
    ExperimentConfig,
    db_to_linear,
    sweep,
    validate_flip_prob,
    validate_mse_w,
)
from ampcs.quantizer import (
    DesignInputs,
    lemma_a1,
    lemma_a1_quadrature_oracle,
    min_total_mse,
    naive_alpha,
    optimal_alpha,
    q_function,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3

DEFAULT_SEED = 20240901

CSV_COLUMNS = ("axis_value", "method", "metric_mean", "metric_stderr",
               "analytic_value", "trials")


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


# ---------------------------------------------------------------- design


def cmd_design(args) -> int:
    base = SystemParams(args.N, args.K, args.M, args.sigma_s, 0.0)
    sigma_v = snr_to_sigma_v(db_to_linear(args.snr_db), base)
    inputs = DesignInputs(sigma2=base.sigma2, sigma_v=sigma_v,
                          pe=np.full(args.M, args.pe))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        opt = optimal_alpha(inputs)
    naive = naive_alpha(inputs)
    total = min_total_mse(inputs)
    print(f"sigma^2          = {base.sigma2:.6g}")
    print(f"sigma_v          = {sigma_v:.6g}")
    print(f"optimal alpha    = {opt.alpha[0]:.6g}")
    print(f"naive alpha      = {naive.alpha[0]:.6g}")
    print(f"per-node min MSE = {total / args.M:.6g}")
    print(f"total min MSE    = {total:.6g}")
    if any(issubclass(w.category, RuntimeWarning) for w in caught):
        print("warning: pe = 0.5 gives a degenerate zero level; the channel "
              "output carries no information")
    return EXIT_OK


# ----------------------------------------------------------------- sweep


def parse_config(path: Path) -> tuple[ExperimentConfig, str, tuple[str, ...]]:
    """Read an experiment INI file. Returns (config, metric, methods)."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise OSError(f"cannot read config file {path}")
    try:
        system = parser["system"]
        experiment = parser["experiment"]
        kwargs = dict(
            N=system.getint("N"),
            K=system.getint("K"),
            M=system.getint("M"),
            sigma_s=system.getfloat("sigma_s"),
            snr_db=experiment.getfloat("snr_db"),
            pe=experiment.getfloat("pe"),
            quantizer_mode=experiment.get("quantizer_mode", "optimal"),
            recovery_mode=experiment.get("recovery_mode", "l1_demapped"),
            trials=experiment.getint("trials", 500),
            master_seed=experiment.getint("master_seed", DEFAULT_SEED),
            lambda_scale=experiment.getfloat("lambda_scale", 1.0),
            l1_max_iters=experiment.getint("l1_max_iters", 500),
            l1_tol=experiment.getfloat("l1_tol", 1e-5),
            biht_max_iters=experiment.getint("biht_max_iters", 300),
        )
        metric = experiment.get("metric", "nmse")
        methods = tuple(
            m.strip()
            for m in experiment.get(
                "methods", "proposed_l1" if metric == "nmse" else "optimal"
            ).split(",")
            if m.strip()
        )
        if parser.has_section("sweep"):
            sw = parser["sweep"]
            axis = sw.get("axis")
            grid_raw = [g.strip() for g in sw.get("grid", "").split(",") if g.strip()]
            if not grid_raw:
                raise ParameterError(f"{path}: [sweep] grid is empty")
            grid = tuple(float(g) for g in grid_raw)
            kwargs.update(sweep_axis=axis, grid=grid)
        config = ExperimentConfig(**kwargs)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"{path}: malformed config ({exc})") from exc
    if not methods:
        raise ParameterError(f"{path}: no methods given")
    return config, metric, methods


def write_csv(path: Path, result) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for p in result.points:
            writer.writerow(
                [
                    _fmt(p.axis_value),
                    p.method,
                    _fmt(p.metric_mean),
                    _fmt(p.metric_stderr),
                    _fmt(p.analytic_value),
                    str(p.trials),
                ]
            )


def write_manifest(path: Path, config: ExperimentConfig, metric: str,
                   methods: tuple[str, ...], outputs: list[str]) -> None:
    parser = configparser.ConfigParser()
    parser["system"] = {
        "N": str(config.N),
        "K": str(config.K),
        "M": str(config.M),
        "sigma_s": _fmt(config.sigma_s),
    }
    parser["experiment"] = {
        "snr_db": _fmt(config.snr_db),
        "pe": _fmt(config.pe),
        "quantizer_mode": config.quantizer_mode,
        "recovery_mode": config.recovery_mode,
        "trials": str(config.trials),
        "master_seed": str(config.master_seed),
        "lambda_scale": _fmt(config.lambda_scale),
        "l1_max_iters": str(config.l1_max_iters),
        "l1_tol": _fmt(config.l1_tol),
        "biht_max_iters": str(config.biht_max_iters),
        "metric": metric,
        "methods": ", ".join(methods),
    }
    if config.sweep_axis is not None:
        parser["sweep"] = {
            "axis": config.sweep_axis,
            "grid": ", ".join(_fmt(g) for g in config.grid),
        }
    parser["manifest"] = {
        "tool_version": ampcs.__version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": ", ".join(outputs),
    }
    with open(path, "w") as fh:
        parser.write(fh)


def cmd_sweep(args) -> int:
    config, metric, methods = parse_config(Path(args.config))
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.trials is not None:
        config = replace(config, trials=args.trials)
    if config.sweep_axis is None:
        raise ParameterError(f"{args.config}: no [sweep] section")

    out_dir = Path(args.out)
    stem = Path(args.config).stem.removesuffix(".manifest")
    result = sweep(config, metric=metric, methods=methods, workers=args.workers)

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / f"{stem}.csv"
        png_path = out_dir / f"{stem}.png"
        manifest_path = out_dir / f"{stem}.manifest.ini"
        write_csv(csv_path, result)
        from ampcs.plots import render_sweep

        render_sweep(result, str(png_path))
        write_manifest(manifest_path, config, metric, methods,
                       [csv_path.name, png_path.name])
    except OSError as exc:
        print(f"I/O error writing outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {csv_path}")
    print(f"wrote {png_path}")
    print(f"wrote {manifest_path}")
    return EXIT_OK


# -------------------------------------------------------------- validate


def run_validation(trials: int, tolerance_scale: float, seed: int) -> list[dict]:
    """The oracle checks: closed forms against quadrature and Monte Carlo."""
    checks = []

    def add(name, expected, observed, tol):
        checks.append(
            {
                "name": name,
                "expected": expected,
                "observed": observed,
                "tolerance": tol * tolerance_scale,
                "passed": abs(observed - expected) <= tol * tolerance_scale,
            }
        )

    add("q_function_at_1", 0.15865525393145707, float(q_function(1.0)), 1e-9)

    base = SystemParams(1000, 10, 100, 1.0, 0.0)
    sigma_v = snr_to_sigma_v(10.0, base)
    inputs = DesignInputs(sigma2=base.sigma2, sigma_v=sigma_v, pe=np.full(100, 0.05))
    add("optimal_alpha_point", 0.068468, float(optimal_alpha(inputs).alpha[0]), 1e-5)
    add("min_total_mse_point", 0.53121, min_total_mse(inputs), 1e-4)

    worst = 0.0
    for s in np.linspace(0.01, 1.0, 5):
        for sv in np.linspace(0.01, 1.0, 5):
            worst = max(worst, abs(lemma_a1(s, sv) - lemma_a1_quadrature_oracle(s, sv)))
    add("lemma_a1_vs_quadrature_maxerr", 0.0, worst, 1e-9)

    sv = 0.1
    flip_trials = max(trials, 10**5)
    for pe in (0.0, 0.05, 0.2):
        rows = validate_flip_prob(
            [0.0, 0.5 * sv, 1.0 * sv, 2.0 * sv], sv, pe, flip_trials, master_seed=seed
        )
        for row in rows:
            add(
                f"flip_prob_t{row['t'] / sv:g}sv_pe{pe:g}",
                row["predicted"],
                row["empirical"],
                4 * row["stderr"],
            )

    config = ExperimentConfig(
        trials=max(trials // 100, 500),
        master_seed=seed,
        quantizer_mode="optimal",
        recovery_mode="none",
        sweep_axis="pe",
        grid=(0.05, 0.2),
    )
    for row in validate_mse_w(config):
        add(
            f"pipeline_mse_w_pe{row['axis_value']:g}",
            row["analytic"],
            row["empirical"],
            4 * row["stderr"],
        )
    return checks


def cmd_validate(args) -> int:
    checks = run_validation(args.trials, args.tolerance_scale, args.seed)
    all_pass = True
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        all_pass &= c["passed"]
        print(
            f"{c['name']} expected={c['expected']:.9g} "
            f"observed={c['observed']:.9g} tolerance={c['tolerance']:.3g} {status}"
        )
    print("ALL CHECKS PASSED" if all_pass else "SOME CHECKS FAILED")
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ampcs",
        description="Amplitude-aided 1-bit compressive sensing simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="print the closed-form quantizer design")
    d.add_argument("--N", type=int, default=1000)
    d.add_argument("--K", type=int, default=10)
    d.add_argument("--M", type=int, default=100)
    d.add_argument("--sigma-s", dest="sigma_s", type=float, default=1.0)
    d.add_argument("--snr-db", dest="snr_db", type=float, default=10.0)
    d.add_argument("--pe", type=float, default=0.05)
    d.set_defaults(func=cmd_design)

    s = sub.add_parser("sweep", help="run a Monte Carlo sweep from a config file")
    s.add_argument("--config", required=True, help="experiment INI file")
    s.add_argument("--out", default=".", help="output directory")
    s.add_argument("--seed", type=int, default=None, help="override master seed")
    s.add_argument("--trials", type=int, default=None, help="override trial count")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="run the oracle validation suite")
    v.add_argument("--trials", type=int, default=200000,
                   help="Monte Carlo trials for the flip-probability checks")
    v.add_argument("--tolerance-scale", dest="tolerance_scale", type=float,
                   default=1.0)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ParameterError, StructureError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
