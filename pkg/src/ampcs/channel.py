"""M parallel binary symmetric channels acting on the de-mapped levels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ampcs.errors import ParameterError, StructureError


@dataclass(frozen=True)
class ChannelConfig:
    """Per-node cross-over probabilities, each in [0, 1/2]."""

    pe: np.ndarray

    def __post_init__(self):
        pe = np.atleast_1d(np.asarray(self.pe, dtype=float))
        object.__setattr__(self, "pe", pe)
        if np.any(pe < 0) or np.any(pe > 0.5):
            raise ParameterError("cross-over probabilities must lie in [0, 0.5]")

    @property
    def M(self) -> int:
        return len(self.pe)


@dataclass(frozen=True)
class ReceivedVector:
    """De-mapped values at the fusion center plus a diagnostic record of
    which bits flipped. The flip record is test observability only; the
    fusion center never sees it."""

    y: np.ndarray
    flips: np.ndarray


def transmit(
    q: np.ndarray,
    config: ChannelConfig,
    rng: np.random.Generator,
    alpha: np.ndarray | None = None,
) -> ReceivedVector:
    """Flip each node's value to its negative with probability pe_i.

    The channel carries one bit per node; encoding, decoding, and de-mapping
    collapse to a sign flip on the real value +-alpha_i. If ``alpha`` is
    given, magnitudes are checked against it exactly.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if len(q) != config.M:
        raise StructureError(f"{len(q)} values for {config.M} channels")
    if alpha is not None and not np.array_equal(np.abs(q), np.atleast_1d(alpha)):
        raise StructureError("transmitted magnitudes do not match the quantizer levels")
    flips = rng.random(config.M) < config.pe
    y = np.where(flips, -q, q)
    return ReceivedVector(y=y, flips=flips)


def mismatch_vector(received: ReceivedVector, clean_projections: np.ndarray) -> np.ndarray:
    """w_i = y_i - (clean projection at node i)."""
    clean = np.atleast_1d(np.asarray(clean_projections, dtype=float))
    if len(clean) != len(received.y):
        raise StructureError("length mismatch between received vector and projections")
    return received.y - clean
