"""Registry of named test functions with derivatives and growth metadata.

Grammar accepted by :func:`parse_function`::

    poly:c0,c1,...   sum c_i t**i
    exp-decay        exp(-t)
    sin              sin(t)
    abs:c            |t - c|
    runge            1 / (1 + 25 t**2)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from approxop.weights import GrowthEnvelope

__all__ = ["Growth", "ScalarFunction", "parse_function", "REGISTRY_HELP"]

REGISTRY_HELP = "poly:c0,c1,..., exp-decay, sin, abs:c, runge"

Array = Callable[[np.ndarray], np.ndarray]


class Growth(enum.Enum):
    BOUNDED = "bounded"
    LINEAR = "linear"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class ScalarFunction:
    """A vectorized function on [0, inf) plus what the error bounds need.

    ``growth`` is ``None`` for functions outside the quadratic class
    (polynomials of degree three or more).  ``m_f`` is the constant with
    ``|f(x)| <= m_f (1 + x**2)``; ``lip_const`` and ``lip_exp`` describe a
    global Hölder condition ``|f(x) - f(y)| <= lip_const |x - y|**lip_exp``
    when one is known.  ``sup_norm`` is set for bounded functions.
    """

    name: str
    eval: Array
    d1: Optional[Array] = None
    d2: Optional[Array] = None
    growth: Optional[Growth] = None
    m_f: float = math.inf
    lip_const: Optional[float] = None
    lip_exp: float = 1.0
    sup_norm: Optional[float] = None
    poly_degree: Optional[int] = None

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=np.float64))

    def envelope(self, n):
        """Tail envelope for ``k -> f(k/n)``."""
        if self.sup_norm is not None:
            return GrowthEnvelope(self.sup_norm, 0, n)
        if self.poly_degree is not None:
            return GrowthEnvelope(self.m_f, self.poly_degree, n)
        # 1 + t**2 <= 2 max(1, t)**2
        return GrowthEnvelope(2.0 * self.m_f, 2, n)


def _poly(coeffs):
    coeffs = [float(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs.pop()
    p = np.polynomial.Polynomial(coeffs)
    dp, d2p = p.deriv(1), p.deriv(2)
    degree = len(coeffs) - 1
    total = math.fsum(abs(c) for c in coeffs)
    if degree == 0:
        growth, sup = Growth.BOUNDED, abs(coeffs[0])
    elif degree == 1:
        growth, sup = Growth.LINEAR, None
    elif degree == 2:
        growth, sup = Growth.QUADRATIC, None
    else:
        growth, sup = None, None
    # only affine maps are globally Lipschitz on [0, inf)
    lip = abs(coeffs[1]) if degree == 1 else (0.0 if degree == 0 else None)
    name = "poly:" + ",".join(_fmt(c) for c in coeffs)
    return ScalarFunction(
        name=name,
        eval=lambda x: p(np.asarray(x, dtype=np.float64)),
        d1=lambda x: dp(np.asarray(x, dtype=np.float64)),
        d2=lambda x: d2p(np.asarray(x, dtype=np.float64)),
        growth=growth,
        m_f=total,
        lip_const=lip,
        sup_norm=sup,
        poly_degree=degree,
    )


def _fmt(c):
    return repr(int(c)) if float(c).is_integer() else repr(float(c))


def _runge():
    return ScalarFunction(
        name="runge",
        eval=lambda x: 1.0 / (1.0 + 25.0 * x * x),
        d1=lambda x: -50.0 * x / (1.0 + 25.0 * x * x) ** 2,
        d2=lambda x: (3750.0 * x * x - 50.0) / (1.0 + 25.0 * x * x) ** 3,
        growth=Growth.BOUNDED,
        m_f=1.0,
        # max |f'| at x = 1/(5 sqrt 3)
        lip_const=15.0 * math.sqrt(3.0) / 8.0,
        sup_norm=1.0,
    )


_FIXED = {
    "exp-decay": lambda: ScalarFunction(
        name="exp-decay",
        eval=lambda x: np.exp(-x),
        d1=lambda x: -np.exp(-x),
        d2=lambda x: np.exp(-x),
        growth=Growth.BOUNDED,
        m_f=1.0,
        lip_const=1.0,
        sup_norm=1.0,
    ),
    "sin": lambda: ScalarFunction(
        name="sin",
        eval=np.sin,
        d1=np.cos,
        d2=lambda x: -np.sin(x),
        growth=Growth.BOUNDED,
        m_f=1.0,
        lip_const=1.0,
        sup_norm=1.0,
    ),
    "runge": _runge,
}


def parse_function(spec: str) -> ScalarFunction:
    """Build a registered function from its textual name."""
    spec = spec.strip()
    if spec in _FIXED:
        return _FIXED[spec]()
    head, _, arg = spec.partition(":")
    try:
        if head == "poly" and arg:
            return _poly(float(c) for c in arg.split(","))
        if head == "abs" and arg:
            c = float(arg)
            if not c >= 0:
                raise ValueError
            return ScalarFunction(
                name=f"abs:{_fmt(c)}",
                eval=lambda x: np.abs(np.asarray(x, dtype=np.float64) - c),
                growth=Growth.LINEAR,
                m_f=1.0 + c,
                lip_const=1.0,
            )
    except ValueError:
        pass
    raise KeyError(f"unknown function {spec!r}; registry: {REGISTRY_HELP}")
