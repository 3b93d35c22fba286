"""Steering detection for bipartite quantum states.

The package decides whether a bipartite state is steerable, in either
direction, by bordering its correlation matrix with Bloch vectors under
free nonnegative weights and comparing the trace norm against a bound
satisfied by every unsteerable state. It also searches the weights for
the strongest certificate and locates steerability thresholds in
one-parameter state families.
"""
from .basis import (
    BasisDiagnostics,
    GeneratorBasis,
    InvalidDimensionError,
    generator_basis,
    verify_basis,
)
from .bloch import (
    FAMILIES,
    BlochForm,
    DensityMatrix,
    StateDiagnostics,
    StateValidationError,
    bloch_decompose,
    bloch_reconstruct,
    complex_to_pairs,
    example1_state,
    example2_state,
    family_state,
    isotropic_state,
    load_state,
    pairs_to_complex,
    ppt_min_eigenvalue,
    reduced_states,
    state_diagnostics,
    state_from_dict,
    state_to_dict,
    swap_parties,
    validate_density,
    werner_state,
)
from .criterion import (
    CriterionParams,
    CriterionReport,
    PairParams,
    QuadParams,
    VectorParams,
    bordered_matrix,
    criterion_matrix,
    evaluate,
    evaluate_bloch,
    scaled_bordered_matrix,
    trace_norm,
    unsteerable_bound,
    vector_bordered_matrix,
)
from .estimator import BlochFeatures, SteeringDetector
from .optimize import (
    BracketError,
    NonMonotoneError,
    ParamSearchConfig,
    ThresholdResult,
    detection_curve,
    mixture_family,
    optimize_params,
    threshold_scan,
)

__version__ = "0.1.0"

__all__ = [
    "BasisDiagnostics",
    "BlochFeatures",
    "BlochForm",
    "BracketError",
    "CriterionParams",
    "CriterionReport",
    "DensityMatrix",
    "FAMILIES",
    "GeneratorBasis",
    "InvalidDimensionError",
    "NonMonotoneError",
    "PairParams",
    "ParamSearchConfig",
    "QuadParams",
    "StateDiagnostics",
    "StateValidationError",
    "SteeringDetector",
    "ThresholdResult",
    "VectorParams",
    "bloch_decompose",
    "bloch_reconstruct",
    "bordered_matrix",
    "complex_to_pairs",
    "criterion_matrix",
    "detection_curve",
    "evaluate",
    "evaluate_bloch",
    "example1_state",
    "example2_state",
    "family_state",
    "generator_basis",
    "isotropic_state",
    "load_state",
    "mixture_family",
    "optimize_params",
    "pairs_to_complex",
    "ppt_min_eigenvalue",
    "reduced_states",
    "scaled_bordered_matrix",
    "state_diagnostics",
    "state_from_dict",
    "state_to_dict",
    "swap_parties",
    "threshold_scan",
    "trace_norm",
    "unsteerable_bound",
    "validate_density",
    "vector_bordered_matrix",
    "verify_basis",
    "werner_state",
]
