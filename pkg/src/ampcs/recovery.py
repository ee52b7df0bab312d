"""Fusion-center sparse recovery.

The proposed path runs an l1-regularized least-squares solve (accelerated
proximal gradient with monotone restart) on the de-mapped amplitude vector.
A sign-only binary iterative hard thresholding baseline is included for
comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ampcs.errors import ParameterError, StructureError
from ampcs.model import SensingMatrix, SparseSignal, SystemParams


@dataclass(frozen=True)
class L1SolverParams:
    lam: float
    max_iters: int = 500
    tol: float = 1e-6

    def __post_init__(self):
        if self.lam <= 0:
            raise ParameterError("lam must be positive")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ParameterError("tol must be positive")


@dataclass(frozen=True)
class RecoveryResult:
    s_hat: np.ndarray
    iterations: int
    converged: bool
    residual_norm: float


def soft_threshold(x, theta):
    return np.sign(x) * np.maximum(np.abs(x) - theta, 0.0)


def spectral_norm_sq(A: np.ndarray, max_iters: int = 100, tol: float = 1e-6) -> float:
    """Largest squared singular value of A, by power iteration on A^T A."""
    v = np.ones(A.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iters):
        w = A.T @ (A @ v)
        lam_new = np.linalg.norm(w)
        if lam_new == 0:
            return 0.0
        v = w / lam_new
        if abs(lam_new - lam) <= tol * lam_new:
            return lam_new
        lam = lam_new
    return lam


def solve_l1(y: np.ndarray, matrix: SensingMatrix, params: L1SolverParams) -> RecoveryResult:
    """Approximately minimize 0.5*||Phi s - y||^2 + lam*||s||_1.

    FISTA with a monotone restart: if the objective increases beyond
    round-off slack the momentum is reset. Returns the best iterate seen.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    A = matrix.rows
    if len(y) != A.shape[0]:
        raise StructureError(f"y has length {len(y)}, matrix has {A.shape[0]} rows")
    L = spectral_norm_sq(A)
    if L == 0:
        return RecoveryResult(np.zeros(A.shape[1]), 0, True, float(np.linalg.norm(y)))
    step = 1.0 / L
    theta = params.lam * step

    def objective(s, r):
        return 0.5 * float(r @ r) + params.lam * float(np.abs(s).sum())

    x = np.zeros(A.shape[1])
    z = x
    t = 1.0
    r = A @ x - y
    best_obj = objective(x, r)
    best_x = x
    converged = False
    it = 0
    for it in range(1, params.max_iters + 1):
        grad = A.T @ (A @ z - y)
        x_new = soft_threshold(z - step * grad, theta)
        r_new = A @ x_new - y
        obj = objective(x_new, r_new)
        if obj > best_obj + 1e-12:
            # momentum overshoot: restart from the best point
            z = best_x
            t = 1.0
            x = best_x
            continue
        if obj < best_obj:
            best_obj = obj
            best_x = x_new
        dx = np.linalg.norm(x_new - x)
        if dx <= params.tol * max(np.linalg.norm(x), 1e-12):
            x = x_new
            converged = True
            break
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x = x_new
        t = t_new
    s_hat = best_x
    return RecoveryResult(
        s_hat=s_hat,
        iterations=it,
        converged=converged,
        residual_norm=float(np.linalg.norm(A @ s_hat - y)),
    )


def _hard_threshold(x: np.ndarray, K: int) -> np.ndarray:
    out = np.zeros_like(x)
    if K >= len(x):
        return x.copy()
    keep = np.argpartition(np.abs(x), -K)[-K:]
    out[keep] = x[keep]
    return out


def biht(
    signs: np.ndarray,
    matrix: SensingMatrix,
    K: int,
    step: float | None = None,
    max_iters: int = 300,
) -> RecoveryResult:
    """Binary iterative hard thresholding on sign-only measurements.

    Iterates s <- H_K(s + step * Phi^T (signs - sign(Phi s)) / 2) from a
    zero start, keeps the iterate with the fewest sign inconsistencies, and
    normalizes it to unit norm (sign measurements carry no amplitude).
    """
    signs = np.atleast_1d(np.asarray(signs, dtype=float))
    A = matrix.rows
    if len(signs) != A.shape[0]:
        raise StructureError("sign vector length does not match matrix rows")
    if K > A.shape[1]:
        raise ParameterError("K exceeds the signal dimension")
    if step is None:
        step = 1.0 / A.shape[0]

    x = np.zeros(A.shape[1])
    best_x = x
    best_bad = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        # 0 -> 0 here so the first step from the zero start is the plain
        # matched filter Phi^T signs rather than a biased Phi^T (signs - 1)
        proj_signs = np.sign(A @ x)
        bad = int(np.count_nonzero(np.where(proj_signs == 0, 1.0, proj_signs) != signs))
        if bad < best_bad and np.linalg.norm(x) > 0:
            best_bad = bad
            best_x = x
        if bad == 0 and np.linalg.norm(x) > 0:
            break
        x = _hard_threshold(x + step * (A.T @ (signs - proj_signs)) / 2.0, K)
    norm = np.linalg.norm(best_x)
    direction = best_x / norm if norm > 0 else best_x
    return RecoveryResult(
        s_hat=direction,
        iterations=it,
        converged=best_bad == 0,
        residual_norm=float(best_bad),
    )


def amplitude_rescale(direction: np.ndarray, params: SystemParams) -> np.ndarray:
    """Scale a unit-norm direction to the model's RMS amplitude sqrt(K)*sigma_s.

    The fusion center knows the signal statistics but not the realized norm,
    so the expected norm is the natural scale. A zero vector stays zero.
    """
    direction = np.asarray(direction, dtype=float)
    if np.linalg.norm(direction) == 0:
        return np.zeros_like(direction)
    return np.sqrt(params.K) * params.sigma_s * direction


def nmse(s: SparseSignal, s_hat: np.ndarray) -> float:
    """Single-trial ratio ||s - s_hat||^2 / ||s||^2."""
    s_hat = np.asarray(s_hat, dtype=float)
    if s_hat.shape != s.values.shape:
        raise StructureError("dimension mismatch between signal and estimate")
    den = float(s.values @ s.values)
    if den == 0:
        raise ParameterError("nmse undefined for a zero signal")
    diff = s.values - s_hat
    return float(diff @ diff) / den
