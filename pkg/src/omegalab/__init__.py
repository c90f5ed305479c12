"""Universal prefix-coding laboratory.

Elias omega (plus gamma/delta baselines) over unbounded integers, exact
Kraft sums, the iterated-log renormalization flow, mixed discrete and
continuous source laws, and their quantization into finite codes.
"""

from omegalab.bits import BitString
from omegalab.codecs import (
    beta,
    delta_decode,
    delta_encode,
    delta_len,
    gamma_decode,
    gamma_encode,
    gamma_len,
    log_star2,
    omega_chain,
    omega_decode,
    omega_encode,
    omega_len,
)
from omegalab.errors import (
    ContainerError,
    CoverageError,
    DomainError,
    EmptyCell,
    LawValidationError,
    OmegaLabError,
    QuadratureFailure,
    ResourceLimit,
    TruncatedStream,
    ZeroMassRegion,
)
from omegalab.kraft import (
    Dyadic,
    block_sum,
    brute_partial_sum,
    completeness_gap,
    partial_sum_beta_le,
)

__version__ = "0.1.0"
