"""
fatpoints - Dimensions of quasi-homogeneous plane-curve linear systems.

A system L(d, m0, n, m) is the space of degree-d plane curves with an m0-fold
point and n further m-fold points in general position. The package computes
its dimension through the classification lists, Cremona reduction, a rank
oracle over a prime field, and a degeneration prover that emits checkable
traces.

Example:
    from fatpoints import LinearSystem, Prover, check_trace

    prover = Prover()
    trace = prover.prove(LinearSystem(12, 1, 9, 4), hints=[(4, 5)])
    print(trace.dimension, trace.claim.rule.value)
    assert check_trace(trace)
"""

from fatpoints.cache import CacheEntry, CacheFile
from fatpoints.classifier import (
    Family,
    MinusOneClass,
    SpecialityVerdict,
    VerdictStatus,
    Witness,
    classify,
    classify_dimension,
    large_m0_dimension,
    minus_one_list_m4,
    minus_one_list_small_m,
    verify_minus_one_witness,
)
from fatpoints.config import FatpointsConfig
from fatpoints.core import (
    DimensionReport,
    LinearSystem,
    MultVector,
    Source,
    expected_dimension,
    genus,
    intersection,
    self_intersection,
    virtual_dimension,
)
from fatpoints.cremona import (
    CremonaStep,
    ReductionResult,
    ReductionStatus,
    cremona_step,
    dimension_via_cremona,
    reduce,
)
from fatpoints.degeneration import (
    DegenerationNode,
    Rule,
    check_identities,
    degenerate,
    dim_l0,
    try_empty,
    try_expected,
)
from fatpoints.exceptions import (
    CacheError,
    ClassificationError,
    DegenerationError,
    DimensionError,
    FatpointsError,
    IntersectionError,
    InvalidSystemError,
    OracleError,
    SweepError,
    TraceError,
)
from fatpoints.oracle import InterpolationMatrix, OracleResult, build_matrix, rank
from fatpoints.prover import Prover
from fatpoints.sweep import SweepSpec
from fatpoints.trace import ProofStep, ProofTrace, StepRule, TraceCheck, check_trace

__version__ = "0.1.0"

__all__ = [
    # Systems and numerics
    "LinearSystem",
    "MultVector",
    "DimensionReport",
    "Source",
    "virtual_dimension",
    "expected_dimension",
    "intersection",
    "self_intersection",
    "genus",
    # Classification
    "Family",
    "MinusOneClass",
    "Witness",
    "VerdictStatus",
    "SpecialityVerdict",
    "classify",
    "classify_dimension",
    "minus_one_list_m4",
    "minus_one_list_small_m",
    "large_m0_dimension",
    "verify_minus_one_witness",
    # Cremona
    "CremonaStep",
    "ReductionResult",
    "ReductionStatus",
    "cremona_step",
    "reduce",
    "dimension_via_cremona",
    # Oracle
    "InterpolationMatrix",
    "OracleResult",
    "build_matrix",
    "rank",
    # Degeneration and proofs
    "DegenerationNode",
    "Rule",
    "degenerate",
    "check_identities",
    "dim_l0",
    "try_empty",
    "try_expected",
    "Prover",
    "ProofStep",
    "ProofTrace",
    "StepRule",
    "TraceCheck",
    "check_trace",
    # Batch
    "SweepSpec",
    "CacheEntry",
    "CacheFile",
    # Configuration
    "FatpointsConfig",
    # Exceptions
    "FatpointsError",
    "InvalidSystemError",
    "IntersectionError",
    "DimensionError",
    "ClassificationError",
    "OracleError",
    "DegenerationError",
    "TraceError",
    "CacheError",
    "SweepError",
]
