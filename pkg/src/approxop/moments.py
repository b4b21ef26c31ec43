"""Closed-form moment calculus for P_n^[beta] and its series oracles.

``S(r, a, b) = sum_k (a + b k)^(k + r) e^-(a + b k) / k!`` satisfies
``S(r, a, b) = a S(r-1, a, b) + b S(r, a + b, b)`` with ``(1-b) S(0) = 1``;
the closed forms below are the solutions for r = 0..4.  Raw and central
moments of the operator are polynomials in ``x`` with coefficients in
``beta`` and ``1/n``.
"""

from __future__ import annotations

from dataclasses import dataclass

from approxop.operators import OperatorParams
from approxop.weights import (
    DEFAULT_POLICY,
    GrowthEnvelope,
    WeightKind,
    check_beta,
    series_sum,
)

__all__ = [
    "MomentReport",
    "central_moment",
    "central_moment_series",
    "fourth_bound_dominates",
    "fourth_central_bound",
    "moment_report",
    "raw_moment",
    "raw_moment_series",
    "s_closed",
    "s_series",
    "second_central_bound",
]


def _order(r, top=4, bottom=0):
    if int(r) != r or not bottom <= r <= top:
        raise ValueError(f"unsupported moment order {r!r}; closed forms exist for {bottom}..{top}")
    return int(r)


def s_closed(r, alpha, beta):
    r = _order(r)
    a = float(alpha)
    b = check_beta(beta)
    q = 1.0 - b
    if r == 0:
        return 1.0 / q
    if r == 1:
        return a / q**2 + b**2 / q**3
    if r == 2:
        return a**2 / q**3 + 3 * a * b**2 / q**4 + b**3 * (1 + 2 * b) / q**5
    if r == 3:
        return (a**3 / q**4 + 6 * a**2 * b**2 / q**5 + a * b**3 * (4 + 11 * b) / q**6
                + (b**4 + 8 * b**5 + 6 * b**6) / q**7)
    return (a**4 / q**5 + 10 * a**3 * b**2 / q**6 + 5 * a**2 * (2 * b**3 + 7 * b**4) / q**7
            + 5 * a * (b**4 + 10 * b**5 + 10 * b**6) / q**8
            + (b**5 + 22 * b**6 + 58 * b**7 + 24 * b**8) / q**9)


def s_series(r, alpha, beta, policy=DEFAULT_POLICY):
    """Direct summation of S(r, alpha, beta) in log space.

    Each term is ``(a + b k)^r`` times the new-family weight divided by
    ``1 - b``, so the summation reuses the certified weight engine.
    """
    if int(r) != r or r < 0:
        raise ValueError(f"order must be a nonnegative integer, got {r!r}")
    a = float(alpha)
    b = check_beta(beta)
    if a == 0.0 and b == 0.0:
        return 1.0 if r == 0 else 0.0
    # (a + b k)^r <= (a + b)^r max(1, k)^r
    env = GrowthEnvelope(max(1.0, a + b) ** r, int(r), 1.0)
    res = series_sum(lambda k: (a + b * k) ** r, a, b, WeightKind.NEW_FAMILY, policy, env)
    return res.value / (1.0 - b)


def raw_moment(j, params: OperatorParams, x):
    """P_n^[beta](t^j, x) for j = 0..4."""
    j = _order(j)
    n, b, x = params.n, params.beta, float(x)
    q = 1.0 - b
    if j == 0:
        return 1.0
    if j == 1:
        return x / q + b / (n * q**2)
    if j == 2:
        return x**2 / q**2 + x * (1 + 2 * b) / (n * q**3) + b * (1 + 2 * b) / (n**2 * q**4)
    if j == 3:
        c = 1 + 8 * b + 6 * b**2
        return (x**3 / q**3 + 3 * x**2 * (1 + b) / (n * q**4)
                + x * c / (n**2 * q**5) + b * c / (n**3 * q**6))
    c = 1 + 22 * b + 58 * b**2 + 24 * b**3
    return (x**4 / q**4 + 2 * x**3 * (3 + 2 * b) / (n * q**5)
            + x**2 * (7 + 26 * b + 12 * b**2) / (n**2 * q**6)
            + x * c / (n**3 * q**7) + b * c / (n**4 * q**8))


def central_moment(s, params: OperatorParams, x):
    """P_n^[beta]((t - x)^s, x) for s = 1..4, as standalone closed forms."""
    s = _order(s, bottom=1)
    n, b, x = params.n, params.beta, float(x)
    q = 1.0 - b
    if s == 1:
        return x * b / q + b / (n * q**2)
    if s == 2:
        return (x**2 * b**2 / q**2 + x * (1 + 2 * b**2) / (n * q**3)
                + b * (1 + 2 * b) / (n**2 * q**4))
    if s == 3:
        return (x**3 * b**3 / q**3 + 3 * x**2 * b * (1 + b**2) / (n * q**4)
                + x * (1 + 5 * b + 3 * b**2 + 6 * b**3) / (n**2 * q**5)
                + b * (1 + 8 * b + 6 * b**2) / (n**3 * q**6))
    return (x**4 * b**4 / q**4 + 2 * x**3 * b**2 * (3 + 2 * b**2) / (n * q**5)
            + x**2 * (3 + 4 * b + 20 * b**2 + 6 * b**3 + 12 * b**4) / (n**2 * q**6)
            + x * (1 + 18 * b + 30 * b**2 + 32 * b**3 + 24 * b**4) / (n**3 * q**7)
            + b * (1 + 22 * b + 58 * b**2 + 24 * b**3) / (n**4 * q**8))


def raw_moment_series(j, params: OperatorParams, x, policy=DEFAULT_POLICY):
    if int(j) != j or j < 0:
        raise ValueError(f"order must be a nonnegative integer, got {j!r}")
    n = params.n
    env = GrowthEnvelope(1.0, int(j), n)
    return series_sum(lambda k: (k / n) ** j, n * float(x), params.beta,
                      WeightKind.NEW_FAMILY, policy, env).value


def central_moment_series(s, params: OperatorParams, x, policy=DEFAULT_POLICY):
    """Truncated sum of p(k, n x) (k/n - x)^s for s = 1..8."""
    s = _order(s, top=8, bottom=1)
    n, x = params.n, float(x)
    env = GrowthEnvelope((1.0 + x) ** s, s, n)
    return series_sum(lambda k: (k / n - x) ** s, n * x, params.beta,
                      WeightKind.NEW_FAMILY, policy, env).value


def _phi2(x):
    return x * (1.0 + x)


def second_central_bound(params: OperatorParams, x):
    """(1 + (2 + n) b^2) / (n (1 - b)^4) * (x (1 + x) + 1/n)."""
    n, b = params.n, params.beta
    return (1 + (2 + n) * b**2) / (n * (1 - b) ** 4) * (_phi2(float(x)) + 1.0 / n)


def fourth_central_bound(params: OperatorParams, x):
    """267 (x + x^2 + x^3 + x^4) / (n^4 (1 - b)^8).

    This does not dominate the fourth central moment for fixed ``b > 0``
    and large ``n``; see :func:`fourth_bound_dominates`.
    """
    n, b, x = params.n, params.beta, float(x)
    return 267.0 * (x + x**2 + x**3 + x**4) / (n**4 * (1 - b) ** 8)


def fourth_bound_dominates(params: OperatorParams, x):
    return central_moment(4, params, x) <= fourth_central_bound(params, x)


@dataclass(frozen=True)
class MomentReport:
    params: OperatorParams
    x: float
    order: int
    closed: float
    series: float

    @property
    def rel_err(self):
        return abs(self.closed - self.series) / max(abs(self.closed), 1e-300)


def moment_report(kind, order, params: OperatorParams, x, policy=DEFAULT_POLICY):
    """Closed form against series oracle; ``kind`` is ``"raw"`` or ``"central"``."""
    if kind == "raw":
        closed = raw_moment(order, params, x)
        series = raw_moment_series(order, params, x, policy)
    elif kind == "central":
        closed = central_moment(order, params, x)
        series = central_moment_series(order, params, x, policy)
    else:
        raise ValueError(f"kind must be 'raw' or 'central', got {kind!r}")
    return MomentReport(params, float(x), int(order), closed, series)
