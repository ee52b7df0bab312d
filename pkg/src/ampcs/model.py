"""Signal/measurement model: K-sparse source, binary sensing rows, scalar
compression at each node."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ampcs.errors import ParameterError, StructureError


@dataclass(frozen=True)
class SystemParams:
    """Global problem dimensions and noise scales.

    N: signal dimension, K: sparsity, M: number of sensor nodes,
    sigma_s: std-dev of the nonzero signal entries,
    sigma_v: std-dev of each sensing-noise entry.
    """

    N: int
    K: int
    M: int
    sigma_s: float
    sigma_v: float

    def __post_init__(self):
        if self.N < 1 or self.M < 1:
            raise ParameterError("N and M must be positive")
        if self.K < 1:
            raise ParameterError("K must be >= 1 (the signal is K-sparse)")
        if self.K > self.N:
            raise ParameterError(f"K={self.K} exceeds N={self.N}")
        if self.sigma_s <= 0:
            raise ParameterError("sigma_s must be positive")
        if self.sigma_v < 0:
            raise ParameterError("sigma_v must be nonnegative")

    @property
    def sigma2(self) -> float:
        """Variance of a clean projection: K*sigma_s^2/N."""
        return self.K * self.sigma_s**2 / self.N

    @property
    def snr(self) -> float:
        """Linear measurement SNR, sigma2 / sigma_v^2."""
        if self.sigma_v == 0:
            return math.inf
        return self.sigma2 / self.sigma_v**2


@dataclass(frozen=True)
class SparseSignal:
    values: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        nz = set(np.flatnonzero(self.values).tolist())
        if not nz.issubset(set(np.asarray(self.support).tolist())):
            raise StructureError("nonzeros outside declared support")


@dataclass(frozen=True)
class SensingMatrix:
    """M x N matrix with entries +-scale, scale = 1/sqrt(N), unit-norm rows."""

    rows: np.ndarray
    scale: float = field(default=0.0)

    def __post_init__(self):
        if self.rows.ndim != 2:
            raise StructureError("rows must be a 2-D array")
        if self.scale == 0.0:
            object.__setattr__(self, "scale", 1.0 / math.sqrt(self.rows.shape[1]))

    @property
    def M(self) -> int:
        return self.rows.shape[0]

    @property
    def N(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class NodeObservations:
    """Per-node scalar measurements z and the noise-free projections."""

    z: np.ndarray
    clean_projections: np.ndarray


def gen_signal(params: SystemParams, rng: np.random.Generator) -> SparseSignal:
    """Draw a K-sparse signal: support uniform without replacement, nonzero
    entries i.i.d. N(0, sigma_s^2)."""
    support = np.sort(rng.choice(params.N, size=params.K, replace=False))
    values = np.zeros(params.N)
    values[support] = rng.normal(0.0, params.sigma_s, size=params.K)
    return SparseSignal(values=values, support=support)


def gen_matrix(params: SystemParams, rng: np.random.Generator) -> SensingMatrix:
    """Draw an M x N sensing matrix with i.i.d. +-1/sqrt(N) entries."""
    signs = 2 * rng.integers(0, 2, size=(params.M, params.N), dtype=np.int8) - 1
    scale = 1.0 / math.sqrt(params.N)
    return SensingMatrix(rows=signs * scale, scale=scale)


def sense(
    signal: SparseSignal,
    matrix: SensingMatrix,
    params: SystemParams,
    rng: np.random.Generator,
    full_noise_vector: bool = False,
) -> NodeObservations:
    """Compress the noisy observation at each node to a scalar z_i.

    By default the projected noise is drawn directly as N(0, sigma_v^2),
    which is distributionally identical to projecting a full N-dim noise
    vector through a unit-norm row. ``full_noise_vector=True`` does the
    projection explicitly (used by the conditional-probability oracles).
    """
    if matrix.N != len(signal.values):
        raise StructureError(
            f"matrix has N={matrix.N} but signal has length {len(signal.values)}"
        )
    if matrix.M != params.M:
        raise StructureError(f"matrix has M={matrix.M}, params say M={params.M}")
    clean = matrix.rows[:, signal.support] @ signal.values[signal.support]
    if params.sigma_v == 0:
        noise = np.zeros(params.M)
    elif full_noise_vector:
        v = rng.normal(0.0, params.sigma_v, size=(params.M, params.N))
        noise = np.einsum("ij,ij->i", matrix.rows, v)
    else:
        noise = rng.normal(0.0, params.sigma_v, size=params.M)
    return NodeObservations(z=clean + noise, clean_projections=clean)


def snr_to_sigma_v(snr: float, params: SystemParams) -> float:
    """Noise std-dev giving the requested linear measurement SNR."""
    if not snr > 0:
        raise ParameterError("snr must be positive (linear ratio)")
    return math.sqrt(params.K * params.sigma_s**2 / (params.N * snr))
