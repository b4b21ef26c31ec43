"""Generalized-Poisson positive linear operators, their moments and error bounds."""

from approxop.functions import Growth, ScalarFunction, parse_function
from approxop.operators import OperatorParams, apply_jain, apply_p, apply_szasz
from approxop.weights import (
    CapExhausted,
    TruncationPolicy,
    WeightKind,
    series_sum,
    truncation_index,
    weight,
)

__all__ = [
    "CapExhausted",
    "Growth",
    "OperatorParams",
    "ScalarFunction",
    "TruncationPolicy",
    "WeightKind",
    "apply_jain",
    "apply_p",
    "apply_szasz",
    "parse_function",
    "series_sum",
    "truncation_index",
    "weight",
]

__version__ = "0.1.0"
