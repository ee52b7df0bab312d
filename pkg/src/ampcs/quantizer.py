"""MSE-optimal binary quantizer design.

Each node quantizes its scalar measurement against a zero threshold and
ships one bit; the fusion center de-maps the bit to +-alpha_i. The level
alpha_i is chosen to minimize the expected squared mismatch between the
de-mapped value and the clean projection, accounting for sensing noise,
quantization, and channel bit flips.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import erfc

from ampcs.errors import ParameterError, StructureError

_SQRT2 = math.sqrt(2.0)


def q_function(t):
    """Gaussian upper-tail probability Q(t), via the complementary error
    function (relative error well below 1e-12 over the working range)."""
    return 0.5 * erfc(np.asarray(t, dtype=float) / _SQRT2)


@dataclass(frozen=True)
class DesignInputs:
    """Scalars the level design depends on: projection variance sigma2,
    noise std-dev sigma_v, and per-node cross-over probabilities pe."""

    sigma2: float
    sigma_v: float
    pe: np.ndarray

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise ParameterError("sigma2 must be positive")
        if self.sigma_v < 0:
            raise ParameterError("sigma_v must be nonnegative")
        pe = np.atleast_1d(np.asarray(self.pe, dtype=float))
        object.__setattr__(self, "pe", pe)
        if np.any(pe < 0) or np.any(pe > 0.5):
            raise ParameterError(
                "cross-over probabilities must lie in [0, 0.5]; a channel with "
                "pe > 0.5 is equivalent to one with 1-pe after relabeling the "
                "bits, so relabel instead of passing pe > 0.5"
            )

    @property
    def M(self) -> int:
        return len(self.pe)


@dataclass(frozen=True)
class QuantizerSpec:
    """Per-node representation levels. Threshold is fixed at 0 and the
    negative level is -alpha by symmetry of the measurement density."""

    alpha: np.ndarray
    degenerate: np.ndarray = field(default=None)
    threshold: float = 0.0

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        object.__setattr__(self, "alpha", alpha)
        if self.degenerate is None:
            object.__setattr__(self, "degenerate", alpha == 0.0)
        if np.any(alpha < 0):
            raise ParameterError("representation levels must be nonnegative")

    @property
    def M(self) -> int:
        return len(self.alpha)


def flip_prob(clean_projection, sigma_v: float, pe: float):
    """Probability that the de-mapped sign at the fusion center disagrees
    with the sign of the clean projection, for a fixed projection value.

    Combines noise-induced quantizer errors with channel flips:
    pe + (1 - 2*pe) * Q(|projection| / sigma_v).
    """
    if not 0 <= pe <= 0.5:
        raise ParameterError("pe must lie in [0, 0.5]")
    t = np.abs(np.asarray(clean_projection, dtype=float))
    if sigma_v == 0:
        # noiseless limit: only the channel can flip, except at t = 0 where
        # the sign carries no information
        out = np.where(t == 0, 0.5, pe)
    else:
        out = pe + (1.0 - 2.0 * pe) * q_function(t / sigma_v)
    return out[()]


def _alpha_bar(sigma2: float, sigma_v: float, pe):
    ratio2 = sigma_v**2 / sigma2
    return np.sqrt(2.0 * sigma2 * (1.0 - 2.0 * np.asarray(pe)) ** 2 / (math.pi * (1.0 + ratio2)))


def optimal_alpha(inputs: DesignInputs) -> QuantizerSpec:
    """Closed-form MSE-minimizing representation level per node."""
    alpha = _alpha_bar(inputs.sigma2, inputs.sigma_v, inputs.pe)
    degenerate = alpha == 0.0
    if np.any(degenerate):
        warnings.warn(
            "pe = 0.5 yields a degenerate zero representation level",
            RuntimeWarning,
            stacklevel=2,
        )
    return QuantizerSpec(alpha=alpha, degenerate=degenerate)


def naive_alpha(inputs: DesignInputs) -> QuantizerSpec:
    """Level designed as if the channel were error-free (pe forced to 0)."""
    alpha = _alpha_bar(inputs.sigma2, inputs.sigma_v, np.zeros_like(inputs.pe))
    return QuantizerSpec(alpha=alpha)


def analytic_node_mse(alpha: float, sigma2: float, sigma_v: float, pe: float) -> float:
    """Expected squared mismatch at one node for a given level alpha."""
    abar = float(_alpha_bar(sigma2, sigma_v, pe))
    ratio2 = sigma_v**2 / sigma2
    return (alpha - abar) ** 2 + sigma2 - 2.0 * sigma2 * (1.0 - 2.0 * pe) ** 2 / (
        math.pi * (1.0 + ratio2)
    )


def analytic_total_mse(spec: QuantizerSpec, inputs: DesignInputs) -> float:
    """Sum of per-node mismatch MSEs for the given levels."""
    if spec.M != inputs.M:
        raise StructureError(f"spec has {spec.M} levels but inputs have {inputs.M} nodes")
    return math.fsum(
        analytic_node_mse(a, inputs.sigma2, inputs.sigma_v, p)
        for a, p in zip(spec.alpha, inputs.pe)
    )


def min_total_mse(inputs: DesignInputs) -> float:
    """Minimal achievable total mismatch MSE (levels set optimally)."""
    ratio2 = inputs.sigma_v**2 / inputs.sigma2
    per_node = inputs.sigma2 - 2.0 * inputs.sigma2 * (1.0 - 2.0 * inputs.pe) ** 2 / (
        math.pi * (1.0 + ratio2)
    )
    return math.fsum(per_node)


def quantize(z, spec: QuantizerSpec):
    """Map measurements to +-alpha_i; z = 0 maps to +alpha_i."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if len(z) != spec.M:
        raise StructureError(f"{len(z)} measurements for {spec.M} levels")
    return np.where(z >= 0, spec.alpha, -spec.alpha)


def lemma_a1(sigma: float, sigma_v: float) -> float:
    """Closed form of the half-Gaussian/Q-function cross moment
    int_0^inf t Q(t/sigma_v) 2 phi_sigma(t) dt."""
    if sigma <= 0 or sigma_v <= 0:
        raise ParameterError("sigma and sigma_v must be positive")
    s2 = sigma**2
    return math.sqrt(s2 / (2.0 * math.pi)) * (1.0 - math.sqrt(s2 / (s2 + sigma_v**2)))


def lemma_a1_quadrature_oracle(sigma: float, sigma_v: float) -> float:
    """Adaptive quadrature of the same integral; test oracle only."""
    if sigma <= 0 or sigma_v <= 0:
        raise ParameterError("sigma and sigma_v must be positive")

    def integrand(t):
        return (
            t
            * float(q_function(t / sigma_v))
            * 2.0
            * math.exp(-(t**2) / (2.0 * sigma**2))
            / math.sqrt(2.0 * math.pi * sigma**2)
        )

    upper = 10.0 * max(sigma, sigma_v)
    # hint the integrand's support to the subdivision when sigma_v >> sigma
    pts = sorted({p for p in (sigma, 5.0 * sigma, sigma_v) if 0.0 < p < upper})
    value, abserr = integrate.quad(
        integrand, 0.0, upper, epsabs=1e-11, limit=200, points=pts
    )
    if abserr > 1e-9:
        raise RuntimeError(f"quadrature did not converge: abserr={abserr:g}")
    return value
