"""Generalized-Poisson and Jain weights, and certified series summation.

Two weight families are supported, both indexed by ``k = 0, 1, 2, ...``::

    new family:  p(k, a) = (1 - b) (a + b k)^k exp(-(a + b k)) / k!
    Jain:        w(k, a) = a (a + b k)^(k - 1) exp(-(a + b k)) / k!

Both sum to one over ``k`` for ``a >= 0`` and ``0 <= b < 1``.  Writing
``c = a + b k`` each weight is a Poisson kernel ``c^k e^-c / k!`` times
``(1 - b)`` or ``a / c``, which is how they are evaluated here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from approxop._poisson import log_poisson_kernel, poisson_kernel

__all__ = [
    "CapExhausted",
    "GrowthEnvelope",
    "SeriesResult",
    "TruncationPolicy",
    "WeightKind",
    "DEFAULT_POLICY",
    "check_beta",
    "log_weight",
    "log_weights",
    "series_sum",
    "truncation_index",
    "weight",
    "weights",
]


class WeightKind(enum.Enum):
    NEW_FAMILY = "new"
    JAIN = "jain"


class CapExhausted(RuntimeError):
    """Raised when ``max_terms`` runs out before the tail is certified."""

    def __init__(self, mass, terms, message=None):
        self.mass = float(mass)
        self.terms = int(terms)
        super().__init__(
            message
            or f"term cap of {terms} exhausted with accumulated mass {mass!r}"
        )


@dataclass(frozen=True)
class TruncationPolicy:
    epsilon: float = 1e-12
    max_terms: int = 1_000_000

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError(f"max_terms must be a positive integer, got {self.max_terms!r}")


DEFAULT_POLICY = TruncationPolicy()


def check_beta(beta):
    beta = float(beta)
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must satisfy 0 <= beta < 1, got {beta!r}")
    return beta


def _check_alpha(alpha):
    alpha = float(alpha)
    if not alpha >= 0.0:
        raise ValueError(f"alpha must be nonnegative, got {alpha!r}")
    return alpha


def log_weights(k, alpha, beta, kind=WeightKind.NEW_FAMILY):
    """Vectorized log-weights for integer array ``k``; ``-inf`` for zero weights."""
    alpha = _check_alpha(alpha)
    beta = check_beta(beta)
    k = np.asarray(k, dtype=np.float64)
    c = alpha + beta * k
    lp = log_poisson_kernel(k, c)
    if kind is WeightKind.NEW_FAMILY:
        return lp + math.log1p(-beta)
    # Jain: factor a/c, equal to 1 at k = 0 (0**0 = 1 when a = 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(k == 0, 0.0, np.log(alpha) - np.log(c))
    return np.where((alpha == 0.0) & (k > 0), -np.inf, lp + factor)


def weights(k, alpha, beta, kind=WeightKind.NEW_FAMILY):
    """Vectorized weights; the Poisson prefactor is kept outside the exponential."""
    alpha = _check_alpha(alpha)
    beta = check_beta(beta)
    k = np.asarray(k, dtype=np.float64)
    c = alpha + beta * k
    pk = poisson_kernel(k, c)
    if kind is WeightKind.NEW_FAMILY:
        return (1.0 - beta) * pk
    if alpha == 0.0:
        return np.where(k == 0, 1.0, 0.0)
    return np.where(k == 0, pk, pk * (alpha / np.where(c == 0, 1.0, c)))


def _check_k(k):
    if int(k) != k or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k!r}")
    return int(k)


def log_weight(k, alpha, beta, kind=WeightKind.NEW_FAMILY):
    """Natural log of a single weight (``-inf`` when the weight is zero)."""
    return float(log_weights(np.array([_check_k(k)]), alpha, beta, kind)[0])


def weight(k, alpha, beta, kind=WeightKind.NEW_FAMILY):
    return float(weights(np.array([_check_k(k)]), alpha, beta, kind)[0])


def truncation_index(alpha, beta, kind=WeightKind.NEW_FAMILY, policy=DEFAULT_POLICY):
    """Smallest ``K`` with ``1 - sum_{k<=K} weight(k) < epsilon``.

    The partial sums are exact-rounded (``math.fsum``), so the answer is
    decided by the true cumulative mass up to one rounding.

    Raises:
        CapExhausted: if no ``K < max_terms`` qualifies.
    """
    target = 1.0 - policy.epsilon
    chunks = []
    total = np.longdouble(0.0)
    start = 0
    size = 256
    while start < policy.max_terms:
        stop = min(start + size, policy.max_terms)
        w = weights(np.arange(start, stop), alpha, beta, kind)
        running = total + np.cumsum(w.astype(np.longdouble))
        # longdouble cumsum locates the candidate; fsum confirms it
        hits = np.nonzero(running >= target - 1e-15)[0]
        chunks.append(w)
        if hits.size:
            head = np.concatenate(chunks[:-1]) if len(chunks) > 1 else w[:0]
            for i in range(hits[0], w.size):
                # fsum of the whole prefix; the first index passing the exact test wins
                if 1.0 - math.fsum(np.concatenate([head, w[: i + 1]])) < policy.epsilon:
                    return start + i
        total = running[-1]
        start = stop
        size *= 2
    mass = math.fsum(np.concatenate(chunks)) if chunks else 0.0
    raise CapExhausted(mass, policy.max_terms)


@dataclass(frozen=True)
class GrowthEnvelope:
    """Bound ``|g(k)| <= coef * max(1, k / scale) ** degree`` used for tail control."""

    coef: float
    degree: int = 0
    scale: float = 1.0

    def __call__(self, k):
        return self.coef * max(1.0, k / self.scale) ** self.degree


@dataclass(frozen=True)
class SeriesResult:
    value: float
    residual_mass: float
    tail_bound: float
    lo: int
    hi: int

    def __float__(self):
        return self.value

    @property
    def terms(self):
        return self.hi - self.lo + 1


def _center(alpha, beta, kind):
    q = 1.0 - beta
    mean = alpha / q + (beta / (q * q) if kind is WeightKind.NEW_FAMILY else 0.0)
    sd = math.sqrt((alpha + beta) / q ** 3 + 1.0)
    return mean, sd


def series_sum(
    g: Callable[[np.ndarray], np.ndarray],
    alpha,
    beta,
    kind=WeightKind.NEW_FAMILY,
    policy=DEFAULT_POLICY,
    envelope: Optional[GrowthEnvelope] = None,
) -> SeriesResult:
    """Certified ``sum_k weight(k) g(k)`` over a window ``[lo, hi]``.

    ``g`` receives an integer ndarray of indices and returns same-shape
    values.  The omitted mass on both sides is bounded geometrically:
    the successive weight ratio ``r_k = w_{k+1}/w_k`` decreases up to a
    minimum and then increases toward ``b e^(1-b)`` (or decreases to 0
    when ``b = 0``), so the tail beyond the window is dominated by a
    geometric series with the worst ratio at its edge.  Summation stops
    when the omitted mass is below ``epsilon`` and the omitted part of
    the sum, bounded through ``envelope``, is below
    ``epsilon * max(1, |value|)``.

    Without an envelope ``g`` is treated as bounded by its largest
    magnitude on the window.
    """
    alpha = _check_alpha(alpha)
    beta = check_beta(beta)
    eps = policy.epsilon
    rho = beta * math.exp(1.0 - beta)
    mean, sd = _center(alpha, beta, kind)

    if alpha == 0.0 and (beta == 0.0 or kind is WeightKind.JAIN):
        v = float(np.asarray(g(np.array([0])), dtype=np.float64)[0])
        return SeriesResult(v, 0.0, 0.0, 0, 0)

    lo = max(0, int(math.floor(mean - 10.0 * sd)))
    hi = int(math.ceil(mean + 10.0 * sd)) + 10
    grow = max(16, int(4 * sd))
    while True:
        capped = hi - lo + 1 >= policy.max_terms
        if capped:
            hi = lo + policy.max_terms - 1
        first = max(lo - 1, 0)
        ks = np.arange(first, hi + 3)
        w_all = weights(ks, alpha, beta, kind)
        off = lo - first
        w = w_all[off: off + hi - lo + 1]
        kw = ks[off: off + hi - lo + 1]
        gv = np.asarray(g(kw), dtype=np.float64)
        value = math.fsum(w * gv)
        env = envelope or GrowthEnvelope(float(np.max(np.abs(gv))) if gv.size else 0.0)

        # right tail: j >= hi + 1
        w1, w2 = w_all[-2], w_all[-1]
        right_ok = True
        if w1 == 0.0:
            right_mass = g_right = 0.0
            right_ok = hi >= mean
        else:
            q = max(w2 / w1, rho)
            gq = q * ((hi + 2) / (hi + 1)) ** env.degree
            if hi < mean or gq >= 1.0:
                right_ok = False
                right_mass = g_right = math.inf
            else:
                right_mass = w1 / (1.0 - q)
                g_right = env(hi + 1) * w1 / (1.0 - gq)

        # left tail: j <= lo - 1, valid only on the ascending side
        left_ok = True
        if lo == 0:
            left_mass = g_left = 0.0
        else:
            w0 = w_all[0]
            if w0 == 0.0:
                left_mass = g_left = 0.0
            elif w[0] <= w0:
                left_ok = False
                left_mass = g_left = math.inf
            else:
                ql = w0 / w[0]
                left_mass = w0 / (1.0 - ql)
                g_left = env(lo - 1) * left_mass

        residual = left_mass + right_mass
        tail = g_left + g_right
        mass_ok = residual < eps
        tail_ok = tail <= eps * max(1.0, abs(value))
        if mass_ok and tail_ok:
            return SeriesResult(value, residual, tail, lo, hi)
        if capped:
            raise CapExhausted(math.fsum(w), policy.max_terms)
        need_left = not left_ok or left_mass >= eps / 2 or g_left > tail / 2
        need_right = not right_ok or right_mass >= eps / 2 or g_right >= tail / 2
        expanded = False
        if need_left and lo > 0:
            lo = max(0, lo - grow)
            expanded = True
        if need_right or not expanded:
            hi += grow
        grow *= 2
