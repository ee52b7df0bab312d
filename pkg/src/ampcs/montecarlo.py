"""End-to-end trial runner and parameter sweeps.

Every trial gets its own RNG stream derived from (master_seed, point index,
trial index), so serial and worker-pool execution produce identical
aggregates. Aggregation is an index-ordered compensated sum.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ampcs.channel import ChannelConfig, mismatch_vector, transmit
from ampcs.errors import ParameterError
from ampcs.model import (
    SystemParams,
    gen_matrix,
    gen_signal,
    sense,
    snr_to_sigma_v,
)
from ampcs.quantizer import (
    DesignInputs,
    QuantizerSpec,
    analytic_total_mse,
    flip_prob,
    min_total_mse,
    naive_alpha,
    optimal_alpha,
    quantize,
)
from ampcs.recovery import (
    L1SolverParams,
    amplitude_rescale,
    biht,
    nmse,
    solve_l1,
)

QUANTIZER_MODES = ("optimal", "naive", "fixed")
RECOVERY_MODES = ("l1_demapped", "biht_signs", "none")
SWEEP_AXES = ("pe", "snr_db", "M")


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment point, or a sweep when ``sweep_axis`` is set."""

    N: int = 1000
    K: int = 10
    M: int = 100
    sigma_s: float = 1.0
    snr_db: float = 10.0
    pe: float = 0.05
    quantizer_mode: str = "optimal"
    fixed_alpha: float = 0.0
    recovery_mode: str = "l1_demapped"
    trials: int = 500
    master_seed: int = 20240901
    sweep_axis: str | None = None
    grid: tuple = ()
    lambda_scale: float = 1.0
    l1_max_iters: int = 500
    l1_tol: float = 1e-5
    biht_max_iters: int = 300
    fixed_matrix: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.quantizer_mode not in QUANTIZER_MODES:
            raise ParameterError(f"unknown quantizer_mode {self.quantizer_mode!r}")
        if self.recovery_mode not in RECOVERY_MODES:
            raise ParameterError(f"unknown recovery_mode {self.recovery_mode!r}")
        if self.sweep_axis is not None:
            if self.sweep_axis not in SWEEP_AXES:
                raise ParameterError(f"unknown sweep axis {self.sweep_axis!r}")
            if len(self.grid) == 0:
                raise ParameterError("sweep grid must be nonempty")
            if list(self.grid) != sorted(self.grid):
                raise ParameterError("sweep grid must be sorted ascending")

    def at_point(self, axis_value) -> "ExperimentConfig":
        """Resolve one grid point to a plain (non-sweep) config."""
        if self.sweep_axis is None:
            return self
        kwargs = {self.sweep_axis: axis_value, "sweep_axis": None, "grid": ()}
        if self.sweep_axis == "M":
            kwargs["M"] = int(axis_value)
        return replace(self, **kwargs)

    def system_params(self) -> SystemParams:
        base = SystemParams(self.N, self.K, self.M, self.sigma_s, 0.0)
        sigma_v = snr_to_sigma_v(db_to_linear(self.snr_db), base)
        return SystemParams(self.N, self.K, self.M, self.sigma_s, sigma_v)

    def design_inputs(self) -> DesignInputs:
        sp = self.system_params()
        return DesignInputs(
            sigma2=sp.sigma2, sigma_v=sp.sigma_v, pe=np.full(self.M, self.pe)
        )

    def quantizer(self) -> QuantizerSpec:
        inputs = self.design_inputs()
        if self.quantizer_mode == "optimal":
            return optimal_alpha(inputs)
        if self.quantizer_mode == "naive":
            return naive_alpha(inputs)
        return QuantizerSpec(alpha=np.full(self.M, self.fixed_alpha))


@dataclass(frozen=True)
class TrialRecord:
    err_sq: float
    sig_sq: float
    mse_w: float
    flip_count: int
    iterations: int
    converged: bool

    @property
    def nmse(self) -> float:
        return self.err_sq / self.sig_sq if self.sig_sq > 0 else math.nan


@dataclass(frozen=True)
class PointStat:
    axis_value: float
    method: str
    metric_mean: float
    metric_stderr: float
    analytic_value: float | None
    trials: int


@dataclass(frozen=True)
class SweepResult:
    axis: str
    metric: str
    points: tuple


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, point_index, trial_index])


def run_trial(config: ExperimentConfig, trial_index: int, point_index: int = 0) -> TrialRecord:
    """One full pipeline pass: generate, sense, quantize, transmit, recover."""
    rng = trial_rng(config.master_seed, point_index, trial_index)
    sp = config.system_params()
    signal = gen_signal(sp, rng)
    if config.fixed_matrix:
        # dedicated stream index, out of reach of real trial indices
        matrix = gen_matrix(sp, trial_rng(config.master_seed, point_index, 2**63))
    else:
        matrix = gen_matrix(sp, rng)
    obs = sense(signal, matrix, sp, rng)
    spec = config.quantizer()
    q = quantize(obs.z, spec)
    received = transmit(q, ChannelConfig(pe=np.full(config.M, config.pe)), rng, alpha=spec.alpha)
    w = mismatch_vector(received, obs.clean_projections)
    mse_w = float(w @ w)
    flip_count = int(np.count_nonzero(received.flips))

    iterations = 0
    converged = True
    if config.recovery_mode == "l1_demapped":
        inputs = config.design_inputs()
        lam = config.lambda_scale * math.sqrt(min_total_mse(inputs) / config.M)
        result = solve_l1(
            received.y,
            matrix,
            L1SolverParams(lam=lam, max_iters=config.l1_max_iters, tol=config.l1_tol),
        )
        s_hat = result.s_hat
        iterations, converged = result.iterations, result.converged
    elif config.recovery_mode == "biht_signs":
        signs = np.where(received.y >= 0, 1.0, -1.0)
        result = biht(signs, matrix, config.K, max_iters=config.biht_max_iters)
        s_hat = amplitude_rescale(result.s_hat, sp)
        iterations, converged = result.iterations, result.converged
    else:
        s_hat = None

    if s_hat is None:
        err_sq = math.nan
    else:
        diff = signal.values - s_hat
        err_sq = float(diff @ diff)
    sig_sq = float(signal.values @ signal.values)
    return TrialRecord(
        err_sq=err_sq,
        sig_sq=sig_sq,
        mse_w=mse_w,
        flip_count=flip_count,
        iterations=iterations,
        converged=converged,
    )


def _run_point(args):
    config, point_index, trial_indices = args
    return [run_trial(config, t, point_index) for t in trial_indices]


def run_point(
    config: ExperimentConfig, point_index: int = 0, workers: int = 1
) -> list[TrialRecord]:
    """All trials of one resolved grid point, in trial-index order."""
    indices = list(range(config.trials))
    if workers <= 1:
        return [run_trial(config, t, point_index) for t in indices]
    chunks = [
        (config, point_index, indices[i::workers]) for i in range(workers)
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_point, chunks))
    records: list[TrialRecord | None] = [None] * config.trials
    for (_, _, idxs), part in zip(chunks, parts):
        for t, rec in zip(idxs, part):
            records[t] = rec
    return records


def aggregate_nmse(records: list[TrialRecord]) -> tuple[float, float]:
    """Ratio-of-sums NMSE and the stderr of the per-trial ratios."""
    num = math.fsum(r.err_sq for r in records)
    den = math.fsum(r.sig_sq for r in records)
    ratios = np.array([r.nmse for r in records])
    stderr = float(np.std(ratios, ddof=1) / math.sqrt(len(records))) if len(records) > 1 else 0.0
    return num / den, stderr


def aggregate_mse_w(records: list[TrialRecord]) -> tuple[float, float]:
    vals = np.array([r.mse_w for r in records])
    mean = math.fsum(vals.tolist()) / len(vals)
    stderr = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return mean, stderr


def sweep(
    config: ExperimentConfig,
    metric: str = "nmse",
    methods: tuple[str, ...] | None = None,
    workers: int = 1,
) -> SweepResult:
    """Run trials at every grid point for each requested method.

    For ``metric="nmse"`` a method is a recovery mode ("proposed_l1" or
    "biht"); for ``metric="mse_w"`` it is a quantizer mode ("optimal" or
    "naive") and the analytic column is populated.
    """
    if config.sweep_axis is None:
        raise ParameterError("config has no sweep axis")
    if metric not in ("nmse", "mse_w"):
        raise ParameterError(f"unknown metric {metric!r}")
    if methods is None:
        methods = ("proposed_l1",) if metric == "nmse" else ("optimal",)

    points = []
    for method in methods:
        for point_index, axis_value in enumerate(config.grid):
            pc = config.at_point(axis_value)
            analytic = None
            if metric == "mse_w":
                pc = replace(pc, quantizer_mode=method, recovery_mode="none")
                analytic = analytic_total_mse(pc.quantizer(), pc.design_inputs())
            else:
                mode = {"proposed_l1": "l1_demapped", "biht": "biht_signs"}[method]
                pc = replace(pc, recovery_mode=mode)
            records = run_point(pc, point_index=point_index, workers=workers)
            mean, stderr = (
                aggregate_mse_w(records) if metric == "mse_w" else aggregate_nmse(records)
            )
            points.append(
                PointStat(
                    axis_value=float(axis_value),
                    method=method,
                    metric_mean=mean,
                    metric_stderr=stderr,
                    analytic_value=analytic,
                    trials=config.trials,
                )
            )
    return SweepResult(axis=config.sweep_axis, metric=metric, points=tuple(points))


def validate_mse_w(
    config: ExperimentConfig, workers: int = 1
) -> list[dict]:
    """Empirical E||w||^2 against the closed-form total MSE, per grid point."""
    if config.quantizer_mode not in ("optimal", "naive"):
        raise ParameterError("validate_mse_w needs an optimal or naive quantizer")
    result = sweep(
        config, metric="mse_w", methods=(config.quantizer_mode,), workers=workers
    )
    rows = []
    for p in result.points:
        rows.append(
            {
                "axis_value": p.axis_value,
                "empirical": p.metric_mean,
                "stderr": p.metric_stderr,
                "analytic": p.analytic_value,
                "within_4se": abs(p.metric_mean - p.analytic_value) <= 4 * p.metric_stderr,
            }
        )
    return rows


def validate_flip_prob(
    t_grid,
    sigma_v: float,
    pe: float,
    trials: int,
    master_seed: int = 20240901,
) -> list[dict]:
    """Conditional Monte Carlo check of the sign-flip probability formula.

    For each fixed clean projection t: add sensing noise, take the sign,
    flip it with probability pe, and compare the empirical sign-mismatch
    frequency against flip_prob(t, sigma_v, pe).
    """
    rows = []
    for j, t in enumerate(t_grid):
        rng = np.random.default_rng([master_seed, j])
        noisy = t + rng.normal(0.0, sigma_v, size=trials)
        q_sign = np.where(noisy >= 0, 1.0, -1.0)
        flipped = rng.random(trials) < pe
        received = np.where(flipped, -q_sign, q_sign)
        ref_sign = 1.0 if t >= 0 else -1.0
        mismatch = float(np.count_nonzero(received != ref_sign)) / trials
        predicted = float(flip_prob(t, sigma_v, pe))
        se = math.sqrt(max(predicted * (1 - predicted), 1e-12) / trials)
        rows.append(
            {
                "t": float(t),
                "empirical": mismatch,
                "predicted": predicted,
                "stderr": se,
                "within_4se": abs(mismatch - predicted) <= 4 * se,
            }
        )
    return rows
