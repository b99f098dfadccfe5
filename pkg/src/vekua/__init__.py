"""Vekua-type periodic operators on the torus.

P u = L u - A u - B conj(u) with L a constant-coefficient differential
operator.  The package evaluates symbols and discriminants, solves P u = f
frequency pair by frequency pair, classifies solvability and global
hypoellipticity, and builds explicit non-solvability witnesses.
"""
from .classifiers import (
    Status,
    Verdict,
    analyze,
    classify_elliptic,
    classify_heat,
    classify_vector_field,
    classify_wave,
    recognize,
)
from .diophantine import (
    RealNumberSpec,
    cf_expand,
    irrationality_exponent_estimate,
    non_liouville_certificate,
    small_divisor_scan,
)
from .discriminant import Evidence, ScanConfig, dc_scan, delta, evaluate_batch, zero_set
from .fields import CoefficientField
from .obstruction import (
    build_case1_conditions,
    build_case2_witness,
    decay_report,
    find_slow_sequence,
)
from .operator import (
    OperatorSpec,
    VekuaOperator,
    ellipticity_check,
    heat,
    laplace,
    preset,
    symbol_eval,
    vector_field,
    wave,
)
from .scalar import GaussianRational
from .solver import apply, solve, solve_grid, solve_pair

__version__ = "0.1.0"

__all__ = [
    "CoefficientField",
    "Evidence",
    "GaussianRational",
    "OperatorSpec",
    "RealNumberSpec",
    "ScanConfig",
    "Status",
    "Verdict",
    "VekuaOperator",
    "analyze",
    "apply",
    "build_case1_conditions",
    "build_case2_witness",
    "cf_expand",
    "classify_elliptic",
    "classify_heat",
    "classify_vector_field",
    "classify_wave",
    "dc_scan",
    "decay_report",
    "delta",
    "ellipticity_check",
    "evaluate_batch",
    "find_slow_sequence",
    "heat",
    "irrationality_exponent_estimate",
    "laplace",
    "non_liouville_certificate",
    "preset",
    "recognize",
    "small_divisor_scan",
    "solve",
    "solve_grid",
    "solve_pair",
    "symbol_eval",
    "vector_field",
    "wave",
    "zero_set",
]
