"""Moduli of smoothness, the weighted norm, and the error-bound expressions.

Suprema over continua are replaced by grid maxima: an outer grid in the
base point ``x`` and an inner grid of 100 increments ``h`` in ``(0, delta]``.
Grid maxima never exceed the true suprema, so an error bound evaluated
with them is at most the exact bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from approxop.functions import ScalarFunction
from approxop.operators import OperatorParams, apply_p
from approxop.weights import DEFAULT_POLICY

__all__ = [
    "BoundInputs",
    "Domain",
    "local_approx_bound",
    "lipschitz_bound",
    "modulus_continuity",
    "rate_bound",
    "rate_constant",
    "second_modulus",
    "spread_coefficient",
    "voronovskaya_residual",
    "weighted_norm",
]

H_POINTS = 100
MAX_GRID = 4_000


@dataclass(frozen=True)
class Domain:
    a: float
    b: float
    step: float

    def __post_init__(self):
        if not 0.0 <= self.a < self.b:
            raise ValueError(f"domain needs 0 <= a < b, got [{self.a}, {self.b}]")
        if not 0.0 < self.step <= self.b - self.a:
            raise ValueError(f"step must lie in (0, b - a], got {self.step!r}")

    def grid(self):
        m = int(math.floor((self.b - self.a) / self.step + 1e-9))
        pts = self.a + self.step * np.arange(m + 1)
        if self.b - pts[-1] > 1e-12 * max(1.0, self.b):
            pts = np.append(pts, self.b)
        return pts

    @property
    def tag(self):
        return f"[{self.a!r},{self.b!r}]"


@dataclass(frozen=True)
class BoundInputs:
    """Constants consumed by the error bounds.

    ``m_f`` is the growth or Hölder constant (whichever the bound uses),
    ``a`` the right end of the interval in the rate bound, ``C`` the
    constant relating the K-functional to the second modulus,
    ``alpha_exp`` the Hölder exponent and ``dist_E`` the distance from
    ``x`` to the set where the Hölder condition holds.
    """

    m_f: float = 1.0
    a: float = 1.0
    C: float = 4.0
    alpha_exp: float = 1.0
    dist_E: float = 0.0

    def __post_init__(self):
        if self.m_f < 0 or self.a <= 0 or self.C <= 0 or self.dist_E < 0:
            raise ValueError(f"invalid bound inputs {self!r}")
        if not 0.0 < self.alpha_exp <= 1.0:
            raise ValueError(f"alpha_exp must lie in (0, 1], got {self.alpha_exp!r}")


def _default_step(delta, length):
    return max(delta / H_POINTS, length / MAX_GRID)


def modulus_continuity(f: ScalarFunction, a, delta, step=None):
    """sup |f(t) - f(x)| over x, t in [0, a] with |t - x| <= delta."""
    if not a > 0:
        raise ValueError(f"empty grid: interval [0, {a!r}]")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    delta = min(float(delta), float(a))
    step = step or _default_step(delta, a)
    xs = Domain(0.0, float(a), min(step, a)).grid()
    best = 0.0
    for h in delta * np.arange(1, H_POINTS + 1) / H_POINTS:
        x = xs[xs + h <= a * (1 + 1e-12)]
        x = np.append(x, a - h)
        best = max(best, float(np.max(np.abs(f(x + h) - f(x)))))
    return best


def second_modulus(f: ScalarFunction, delta, domain: Domain, step=None):
    """sup |f(x + 2h) - 2 f(x + h) + f(x)| over 0 < h <= delta, x + 2h in the domain."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    span = domain.b - domain.a
    delta = min(float(delta), span / 2.0)
    xs = domain.grid() if step is None else Domain(domain.a, domain.b, step).grid()
    best = 0.0
    for h in delta * np.arange(1, H_POINTS + 1) / H_POINTS:
        x = xs[xs + 2 * h <= domain.b * (1 + 1e-12)]
        x = np.append(x, domain.b - 2 * h)
        d = f(x + 2 * h) - 2 * f(x + h) + f(x)
        best = max(best, float(np.max(np.abs(d))))
    return best


def weighted_norm(f, x_max=100.0, step=0.01):
    """Grid sup of |f(x)| / (1 + x^2) on [0, x_max]; ``f`` maps arrays to arrays."""
    if not x_max > 0:
        raise ValueError(f"x_max must be positive, got {x_max!r}")
    xs = Domain(0.0, float(x_max), min(step, x_max)).grid()
    return float(np.max(np.abs(f(xs)) / (1.0 + xs * xs)))


def spread_coefficient(params: OperatorParams):
    """(1 + (2 + n) b^2) / (n (1 - b)^4), the factor in the second-moment bound."""
    n, b = params.n, params.beta
    return (1 + (2 + n) * b**2) / (n * (1 - b) ** 4)


def _shift(params, x):
    n, b = params.n, params.beta
    return b * (1 + n * x * (1 - b)) / (n * (1 - b) ** 2)


def local_approx_bound(f: ScalarFunction, params: OperatorParams, x, inputs=BoundInputs(),
                       step=None, domain_end=None):
    """C w2(f, h) + w(f, s) with s the mean shift and h built from the spread.

    The moduli are taken over ``[0, domain_end]`` (default ``max(10, 2x + 1)``)
    as a stand-in for ``[0, inf)``.
    """
    x = float(x)
    n = params.n
    delta2 = x * (1 + x) + 1.0 / n
    s = _shift(params, x)
    h = 0.5 * math.sqrt(spread_coefficient(params) * delta2 + s * s)
    end = domain_end or max(10.0, 2 * x + 1)
    step = step or end / MAX_GRID
    w2 = second_modulus(f, h, Domain(0.0, end, step))
    w1 = modulus_continuity(f, end, s, step) if s > 0 else 0.0
    return inputs.C * w2 + w1


def lipschitz_bound(inputs: BoundInputs, params: OperatorParams, x):
    """M_f ((A (x (1 + x) + 1/n))^(alpha/2) + 2 d^alpha)."""
    x = float(x)
    a = inputs.alpha_exp
    delta2 = x * (1 + x) + 1.0 / params.n
    return inputs.m_f * ((spread_coefficient(params) * delta2) ** (a / 2) + 2 * inputs.dist_E**a)


def rate_constant(m_f, a):
    return 6.0 * m_f * (1 + a * a) * (1 + a + a * a)


def rate_bound(f: ScalarFunction, inputs: BoundInputs, params: OperatorParams, step=None):
    """Bound on sup over [0, a] of |P f - f|: A K + 2 w_{a+1}(f, sqrt(A K))."""
    ak = spread_coefficient(params) * rate_constant(inputs.m_f, inputs.a)
    if ak == 0.0:
        return 0.0
    return ak + 2.0 * modulus_continuity(f, inputs.a + 1.0, math.sqrt(ak), step)


def voronovskaya_residual(f: ScalarFunction, n, beta, x, policy=DEFAULT_POLICY):
    """n (P_n f(x) - f(x)); tends to x f''(x) / 2 when n beta_n -> 0."""
    if f.d2 is None:
        raise ValueError(f"{f.name} has no registered second derivative")
    fx = float(f(np.array([float(x)]))[0])
    return n * (apply_p(f, OperatorParams(n, beta), x, policy) - fx)
