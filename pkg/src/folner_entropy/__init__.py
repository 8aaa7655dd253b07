"""Exact conditional entropy for measure-preserving Z^d actions on finite
and symbolic systems: partition algebra, window entropies along box
schedules, rate estimation, and verifiers for the identities the theory
rests on.
"""

from ._kernels import (
    HAS_NUMBA,
    NUMBA_DISABLED,
    entropy_from_logprobs,
    entropy_from_probs,
)
from .decomposition import (
    ComponentResult,
    DecompositionResult,
    ErgodicComponents,
    MassFunctionResult,
    conditional_mass_function,
    decompose_entropy,
    ergodic_components,
    fixed_partition_witness,
    is_fixed_partition,
    orbit_partition,
    restrict_action,
)
from .engine import (
    ConvergenceReport,
    ExhaustionReport,
    IdentityReport,
    PropertyCheck,
    RateEntry,
    RateInequalityReport,
    RateTrace,
    conditional_block_entropy,
    entropy_rate,
    h_conditional,
    verify_chain_exhaustion,
    verify_entropy_identities,
    verify_rate_inequalities,
)
from .groups import (
    FolnerSequence,
    FolnerSubset,
    SubadditivityReport,
    folner_box,
    invariance_defect,
    translate,
    verify_subadditive_hypotheses,
)
from .spaces import (
    DegenerateFiberError,
    Disintegration,
    FactorSpace,
    FiniteProbabilitySpace,
    Partition,
    SpaceMismatchError,
    conditional_entropy,
    disintegrate,
    entropy,
    factor_space,
    is_coarser,
    join,
    join_all,
    restrict,
    same_space,
)
from .suites import (
    PropertyStats,
    SweepReport,
    phi_cardinality,
    phi_neg_card_squared,
    sweep_disintegration,
    sweep_exhaustion,
    sweep_identities,
    window_entropy_phi,
)
from .systems import (
    DEFAULT_PATTERN_CAP,
    EnumerationCapError,
    FinitePMPAction,
    IncompatibleSubAlgebraError,
    MixtureSystem,
    PatternDistribution,
    ShiftSystem,
    SubAlgebraSpec,
    SymbolPartition,
    TaggedPatternDistribution,
    act,
    bernoulli_shift,
    check_invariant,
    cylinder_measure,
    is_ergodic_model,
    markov_shift,
    mixture,
    stationary_vector,
    window_partition,
)

__version__ = "0.1.0"

__all__ = [
    "HAS_NUMBA",
    "NUMBA_DISABLED",
    "entropy_from_logprobs",
    "entropy_from_probs",
    "ComponentResult",
    "DecompositionResult",
    "ErgodicComponents",
    "MassFunctionResult",
    "conditional_mass_function",
    "decompose_entropy",
    "ergodic_components",
    "fixed_partition_witness",
    "is_fixed_partition",
    "orbit_partition",
    "restrict_action",
    "ConvergenceReport",
    "ExhaustionReport",
    "IdentityReport",
    "PropertyCheck",
    "RateEntry",
    "RateInequalityReport",
    "RateTrace",
    "conditional_block_entropy",
    "entropy_rate",
    "h_conditional",
    "verify_chain_exhaustion",
    "verify_entropy_identities",
    "verify_rate_inequalities",
    "FolnerSequence",
    "FolnerSubset",
    "SubadditivityReport",
    "folner_box",
    "invariance_defect",
    "translate",
    "verify_subadditive_hypotheses",
    "DegenerateFiberError",
    "Disintegration",
    "FactorSpace",
    "FiniteProbabilitySpace",
    "Partition",
    "SpaceMismatchError",
    "conditional_entropy",
    "disintegrate",
    "entropy",
    "factor_space",
    "is_coarser",
    "join",
    "join_all",
    "restrict",
    "same_space",
    "PropertyStats",
    "SweepReport",
    "phi_cardinality",
    "phi_neg_card_squared",
    "sweep_disintegration",
    "sweep_exhaustion",
    "sweep_identities",
    "window_entropy_phi",
    "DEFAULT_PATTERN_CAP",
    "EnumerationCapError",
    "FinitePMPAction",
    "IncompatibleSubAlgebraError",
    "MixtureSystem",
    "PatternDistribution",
    "ShiftSystem",
    "SubAlgebraSpec",
    "SymbolPartition",
    "TaggedPatternDistribution",
    "act",
    "bernoulli_shift",
    "check_invariant",
    "cylinder_measure",
    "is_ergodic_model",
    "markov_shift",
    "mixture",
    "stationary_vector",
    "window_partition",
    "__version__",
]
