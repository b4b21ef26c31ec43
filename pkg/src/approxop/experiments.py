"""Batch runners over (n, beta_n, f, x) grids producing ExperimentReports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from approxop import moments
from approxop.analysis import BoundInputs, Domain, rate_bound
from approxop.functions import ScalarFunction
from approxop.operators import OperatorParams, evaluate
from approxop.weights import DEFAULT_POLICY

__all__ = [
    "BETA_CAP",
    "BetaSchedule",
    "DEFAULT_N_LIST",
    "ExperimentReport",
    "Row",
    "SCHEMA_VERSION",
    "default_moment_grid",
    "run_convergence",
    "run_fourth_moment_limit",
    "run_moment_validation",
    "run_voronovskaya",
    "run_weighted",
]

SCHEMA_VERSION = 1
BETA_CAP = 0.999999
DEFAULT_N_LIST = (10, 32, 100, 316, 1000, 3162, 10000)


@dataclass(frozen=True)
class BetaSchedule:
    """beta_n = min(c n^-p, BETA_CAP)."""

    c: float = 1.0
    p: float = 1.0

    def __post_init__(self):
        if not self.c >= 0:
            raise ValueError(f"schedule constant c must be >= 0, got {self.c!r}")
        if not self.p > 0:
            raise ValueError(f"schedule exponent p must be > 0, got {self.p!r}")

    def __call__(self, n):
        return min(self.c * float(n) ** (-self.p), BETA_CAP)

    @classmethod
    def constant(cls, beta):
        """A schedule pinned at one beta for every n (beta = 0 gives Szász)."""
        return _ConstantSchedule(beta=float(beta))


@dataclass(frozen=True)
class _ConstantSchedule(BetaSchedule):
    beta: float = 0.0

    def __call__(self, n):
        return self.beta


@dataclass(frozen=True)
class Row:
    experiment: str
    n: int
    beta: float
    x: Union[float, str]
    measured: float
    reference: float
    bound: Optional[float] = None
    residual_mass: float = 0.0
    order: Optional[float] = None


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: (r.experiment, r.n, r.x, r.beta))

    def select(self, prefix):
        return [r for r in self.rows if r.experiment.startswith(prefix)]

    def __len__(self):
        return len(self.rows)


def _with_orders(rows):
    """Empirical order log(e_i/e_{i+1}) / log(n_{i+1}/n_i) on consecutive rows."""
    out = [rows[0]] if rows else []
    for prev, cur in zip(rows, rows[1:]):
        order = None
        if prev.measured > 0 and cur.measured > 0 and cur.n != prev.n:
            order = math.log(prev.measured / cur.measured) / math.log(cur.n / prev.n)
        out.append(Row(**{**cur.__dict__, "order": order}))
    return out


def _check_n_list(n_list):
    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError(f"n_list must be nonempty and strictly ascending, got {n_list}")
    return n_list


def _sup_error(f, params, xs, policy, weight=None):
    worst, resid = 0.0, 0.0
    fx = f(xs)
    for x, v in zip(xs, fx):
        res = evaluate(f, params, x, policy=policy)
        e = abs(res.value - v)
        if weight is not None:
            e /= weight(x)
        worst = max(worst, e)
        resid = max(resid, res.residual_mass)
    return worst, resid


def run_convergence(f: ScalarFunction, schedule: BetaSchedule, n_list: Sequence[int],
                    domain: Domain, policy=DEFAULT_POLICY) -> ExperimentReport:
    """Sup over the domain grid of |P_n f - f| for each n, with the rate bound."""
    xs = domain.grid()
    rows = []
    for n in _check_n_list(n_list):
        params = OperatorParams(n, schedule(n))
        err, resid = _sup_error(f, params, xs, policy)
        bound = None
        if f.growth is not None:
            bound = rate_bound(f, BoundInputs(m_f=f.m_f, a=domain.b), params)
        rows.append(Row(f"convergence:{f.name}", n, params.beta, domain.tag, err, 0.0,
                        bound, resid))
    return ExperimentReport(_with_orders(rows))


def run_voronovskaya(f: ScalarFunction, schedule: BetaSchedule, n_list: Sequence[int],
                     x_list: Iterable[float], policy=DEFAULT_POLICY) -> ExperimentReport:
    """n (P_n f(x) - f(x)) against x f''(x) / 2."""
    if f.d2 is None:
        raise ValueError(f"{f.name} has no registered second derivative")
    rows = []
    for n in _check_n_list(n_list):
        params = OperatorParams(n, schedule(n))
        for x in x_list:
            x = float(x)
            res = evaluate(f, params, x, policy=policy)
            fx = float(f(np.array([x]))[0])
            ref = 0.5 * x * float(f.d2(np.array([x]))[0])
            rows.append(Row(f"voronovskaya:{f.name}", n, params.beta, x,
                            n * (res.value - fx), ref, None, res.residual_mass))
    return ExperimentReport(rows)


def run_fourth_moment_limit(schedule: BetaSchedule, n_list: Sequence[int],
                            x_list: Iterable[float]) -> ExperimentReport:
    """n^2 times the fourth central moment against its limit 3 x^2."""
    rows = []
    for n in _check_n_list(n_list):
        params = OperatorParams(n, schedule(n))
        for x in x_list:
            x = float(x)
            mu4 = moments.central_moment(4, params, x)
            rows.append(Row("fourth-moment", n, params.beta, x, n * n * mu4, 3 * x * x,
                            moments.fourth_central_bound(params, x) * n * n, 0.0))
    return ExperimentReport(rows)


def run_weighted(f: ScalarFunction, schedule: BetaSchedule, n_list: Sequence[int],
                 x_max=100.0, step=1.0, policy=DEFAULT_POLICY) -> ExperimentReport:
    """Grid sup over [0, x_max] of |P_n f - f| / (1 + x^2)."""
    xs = Domain(0.0, float(x_max), step).grid()
    rows = []
    for n in _check_n_list(n_list):
        params = OperatorParams(n, schedule(n))
        err, resid = _sup_error(f, params, xs, policy, weight=lambda x: 1.0 + x * x)
        rows.append(Row(f"weighted:{f.name}", n, params.beta, f"[0,{float(x_max)!r}]",
                        err, 0.0, None, resid))
    return ExperimentReport(_with_orders(rows))


def default_moment_grid():
    return [(n, b, x) for n in (1, 5, 10, 50) for b in (0.0, 0.1, 0.5, 0.9)
            for x in (0.1, 1.0, 5.0)]


def run_moment_validation(grid=None, policy=DEFAULT_POLICY) -> ExperimentReport:
    """Closed forms against series oracles, plus both moment-bound comparisons.

    Rows ``raw:j`` and ``central:s`` carry the series value as ``measured``
    and the closed form as ``reference``.  Rows ``bound:second`` and
    ``bound:fourth`` carry the central moment as ``measured`` and the bound.
    """
    grid = list(default_moment_grid() if grid is None else grid)
    if not grid:
        raise ValueError("moment grid is empty")
    rows = []
    for n, b, x in grid:
        params = OperatorParams(int(n), float(b))
        x = float(x)
        for j in range(5):
            rep = moments.moment_report("raw", j, params, x, policy)
            rows.append(Row(f"raw:{j}", params.n, params.beta, x, rep.series, rep.closed))
        for s in range(1, 5):
            rep = moments.moment_report("central", s, params, x, policy)
            rows.append(Row(f"central:{s}", params.n, params.beta, x, rep.series, rep.closed))
        rows.append(Row("bound:second", params.n, params.beta, x,
                        moments.central_moment(2, params, x), 0.0,
                        moments.second_central_bound(params, x)))
        rows.append(Row("bound:fourth", params.n, params.beta, x,
                        moments.central_moment(4, params, x), 0.0,
                        moments.fourth_central_bound(params, x)))
    return ExperimentReport(rows)
