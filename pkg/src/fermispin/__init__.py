"""Spin states, entanglement and Bell correlations of N paired spin-1/2 fermions."""

from .bell import (
    BellReport,
    ChshOperatorSet,
    chsh_classical_bound_check,
    chsh_terms,
    chsh_value_full,
    chsh_value_reduced,
)
from .cache import MatrixCache, cache_get_or_build
from .entanglement import (
    Bipartition,
    WitnessReport,
    negativity_measure,
    partial_transpose,
    ppt_separability_pair,
    sylvester_witness,
    witness_from_source,
)
from .errors import DomainError, InvalidArgumentError, ResourceLimitError, UnsupportedSizeError
from .reduction import (
    LIMIT,
    SubsystemMask,
    TwoSpinWeights,
    pair_correlation,
    pair_correlation_numeric,
    partial_trace,
    two_spin_reduced_analytic,
)
from .rho import (
    ExactDensityMatrix,
    build_rho_pairing,
    build_rho_slater_oracle,
    build_singlet_projector,
    von_neumann_entropy,
)
from .spin_core import (
    ExactVector,
    PerfectMatching,
    SpinBasisState,
    enumerate_matchings,
    matching_count,
    overlap,
    pairing_state,
)

__version__ = "0.1.0"
