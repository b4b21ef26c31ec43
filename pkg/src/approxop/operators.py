"""The operators P_n^[beta], J_n^[beta] (Jain) and Szász-Mirakyan.

All three are series ``sum_k w(k, n x) f(k/n)`` over one of the weight
families in :mod:`approxop.weights`; Szász-Mirakyan is the ``beta = 0``
member of either family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from approxop.functions import ScalarFunction
from approxop.weights import (
    DEFAULT_POLICY,
    SeriesResult,
    WeightKind,
    check_beta,
    series_sum,
)

__all__ = [
    "OperatorParams",
    "X_MAX",
    "apply_jain",
    "apply_p",
    "apply_szasz",
    "evaluate",
]

X_MAX = 1e6


@dataclass(frozen=True)
class OperatorParams:
    n: int
    beta: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        check_beta(self.beta)


def _check_x(x):
    x = float(x)
    if not 0.0 <= x <= X_MAX:
        raise ValueError(f"x must lie in [0, {X_MAX:g}], got {x!r}")
    return x


def evaluate(f: ScalarFunction, params: OperatorParams, x, kind=WeightKind.NEW_FAMILY,
             policy=DEFAULT_POLICY) -> SeriesResult:
    """Full series result (value plus certified residual) for one operator."""
    x = _check_x(x)
    n = params.n
    return series_sum(
        lambda k: f(np.asarray(k, dtype=np.float64) / n),
        n * x,
        params.beta,
        kind,
        policy,
        envelope=f.envelope(n),
    )


def apply_p(f, params, x, policy=DEFAULT_POLICY):
    """P_n^[beta](f, x)."""
    return evaluate(f, params, x, WeightKind.NEW_FAMILY, policy).value


def apply_jain(f, params, x, policy=DEFAULT_POLICY):
    """J_n^[beta](f, x)."""
    return evaluate(f, params, x, WeightKind.JAIN, policy).value


def apply_szasz(f, n, x, policy=DEFAULT_POLICY):
    return apply_p(f, OperatorParams(n, 0.0), x, policy)
