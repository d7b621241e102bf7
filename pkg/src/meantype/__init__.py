"""Mean-type mappings on intervals.

Build tuples of means acting coordinate-wise on I^p, iterate them to
their invariant mean (Gauss iteration), probe contractivity and weak
contractivity (the per-vector index n0 and the derived mapping M*), and
decompose invariant functions as phi o K.
"""

from .decompose import (
    DecompositionReport,
    InvariantFunction,
    check_invariance,
    compose,
    constant_function,
    coordinate_function,
    diagonal_restriction,
    mean_function,
    parse_function,
    product_function,
    sum_function,
    verify_decomposition,
)
from .errors import (
    ArityMismatch,
    ConstantVector,
    DomainViolation,
    EmptyVector,
    InvalidInterval,
    InvalidMapping,
    InvalidMeanSpec,
    MeanTypeError,
    NonFiniteInput,
    NotFoundWithinCap,
    ParseError,
)
from .invariant import (
    InvariantEstimate,
    InvariantMean,
    gauss_iterate,
    invariance_residual,
    invariant_mean,
    uniqueness_probe,
)
from .mapping import (
    ContractivityVerdict,
    IterationTrace,
    MeanTypeMapping,
    TraceStep,
    agm_mapping,
    arithmetic_harmonic_mapping,
    diameter,
    find_n0,
    format_mapping_config,
    is_contractive_at,
    load_mapping,
    parse_mapping_config,
    probe_contractivity,
    projection_mapping,
    sample_vectors,
    shift_average_mapping,
    star_apply,
)
from .means import (
    Generator,
    InternalityReport,
    Interval,
    MeanSpec,
    eval_mean,
    internality_probe,
    make_generator,
    mean_callable,
    parse_interval,
    parse_mean,
)

__version__ = "0.1.0"

__all__ = [
    "ArityMismatch",
    "ConstantVector",
    "ContractivityVerdict",
    "DecompositionReport",
    "DomainViolation",
    "EmptyVector",
    "Generator",
    "InternalityReport",
    "Interval",
    "InvalidInterval",
    "InvalidMapping",
    "InvalidMeanSpec",
    "InvariantEstimate",
    "InvariantFunction",
    "InvariantMean",
    "IterationTrace",
    "MeanSpec",
    "MeanTypeError",
    "MeanTypeMapping",
    "NonFiniteInput",
    "NotFoundWithinCap",
    "ParseError",
    "TraceStep",
    "agm_mapping",
    "arithmetic_harmonic_mapping",
    "check_invariance",
    "compose",
    "constant_function",
    "coordinate_function",
    "diagonal_restriction",
    "diameter",
    "eval_mean",
    "find_n0",
    "format_mapping_config",
    "gauss_iterate",
    "internality_probe",
    "invariance_residual",
    "invariant_mean",
    "is_contractive_at",
    "load_mapping",
    "make_generator",
    "mean_callable",
    "mean_function",
    "parse_function",
    "parse_interval",
    "parse_mapping_config",
    "parse_mean",
    "probe_contractivity",
    "product_function",
    "projection_mapping",
    "sample_vectors",
    "shift_average_mapping",
    "star_apply",
    "sum_function",
    "uniqueness_probe",
    "verify_decomposition",
]
