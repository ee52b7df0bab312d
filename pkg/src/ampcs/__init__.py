"""Amplitude-aided 1-bit compressive sensing over a noisy sensor network.

Local nodes compress a common K-sparse signal to a scalar, quantize it to
one bit with an MSE-optimal representation level, and ship the bit through
a binary symmetric channel to a fusion center that runs sparse recovery on
the de-mapped amplitudes.
"""

from ampcs.errors import ParameterError, StructureError
from ampcs.model import (
    NodeObservations,
    SensingMatrix,
    SparseSignal,
    SystemParams,
    gen_matrix,
    gen_signal,
    sense,
    snr_to_sigma_v,
)
from ampcs.quantizer import (
    DesignInputs,
    QuantizerSpec,
    analytic_node_mse,
    analytic_total_mse,
    flip_prob,
    lemma_a1,
    lemma_a1_quadrature_oracle,
    min_total_mse,
    naive_alpha,
    optimal_alpha,
    q_function,
    quantize,
)
from ampcs.channel import ChannelConfig, ReceivedVector, mismatch_vector, transmit
from ampcs.recovery import (
    L1SolverParams,
    RecoveryResult,
    amplitude_rescale,
    biht,
    nmse,
    solve_l1,
)

__version__ = "0.1.0"
