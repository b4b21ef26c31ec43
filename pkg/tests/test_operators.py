import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from approxop.functions import parse_function
from approxop.operators import OperatorParams, apply_jain, apply_p, apply_szasz, evaluate
from approxop.weights import CapExhausted, TruncationPolicy

TIGHT = TruncationPolicy(1e-14)
ONE, T, T2 = parse_function("poly:1"), parse_function("poly:0,1"), parse_function("poly:0,0,1")
EXP = parse_function("exp-decay")


class TestParams:
    @pytest.mark.parametrize("n", [0, -3, 2.5])
    def test_bad_n(self, n):
        with pytest.raises(ValueError):
            OperatorParams(n, 0.1)

    @pytest.mark.parametrize("beta", [-0.01, 1.0])
    def test_bad_beta(self, beta):
        with pytest.raises(ValueError):
            OperatorParams(10, beta)

    def test_negative_x(self):
        with pytest.raises(ValueError):
            apply_p(ONE, OperatorParams(10, 0.1), -1.0)


class TestApplyP:
    @pytest.mark.parametrize("n,beta,x", [(1, 0.0, 0.0), (10, 0.5, 3.0), (100, 0.9, 0.2)])
    def test_constant(self, n, beta, x):
        assert apply_p(ONE, OperatorParams(n, beta), x) == pytest.approx(1.0, abs=1e-12)

    def test_identity_szasz(self):
        assert apply_p(T, OperatorParams(10, 0.0), 2.0) == pytest.approx(2.0, abs=1e-12)

    def test_identity(self):
        # 1/0.9 + 0.1/(10 * 0.81), checked against a 40-digit brute-force sum
        exact = oracles.series(lambda k: mp.mpf(k) / 10, 10, 0.1)
        got = apply_p(T, OperatorParams(10, 0.1), 1.0, TIGHT)
        assert got == pytest.approx(float(exact), rel=1e-13)
        assert got == pytest.approx(1.1234567901234567, rel=1e-13)

    @pytest.mark.parametrize("n,beta,x", [(1, 0.3, 0.5), (10, 0.1, 1.0), (50, 0.5, 2.0),
                                          (200, 0.01, 0.25), (5, 0.9, 1.0)])
    def test_exp_decay_lambert_oracle(self, n, beta, x):
        exact = oracles.p_exp_decay(n, beta, x)
        assert apply_p(EXP, OperatorParams(n, beta), x, TIGHT) == pytest.approx(float(exact), rel=1e-12)

    def test_cap_propagates(self):
        with pytest.raises(CapExhausted):
            apply_p(EXP, OperatorParams(10, 0.9), 5.0, TruncationPolicy(1e-12, 30))

    def test_residual_below_epsilon(self):
        res = evaluate(T2, OperatorParams(100, 0.2), 3.0, policy=TIGHT)
        assert res.residual_mass < 1e-14
        assert float(res) == res.value


class TestApplyJain:
    def test_constant(self):
        assert apply_jain(ONE, OperatorParams(5, 0.3), 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_identity_szasz(self):
        assert apply_jain(T, OperatorParams(10, 0.0), 2.0) == pytest.approx(2.0, abs=1e-12)

    def test_identity_scales(self):
        assert apply_jain(T, OperatorParams(10, 0.1), 1.0, TIGHT) == pytest.approx(1 / 0.9, rel=1e-13)

    @pytest.mark.parametrize("n,beta,x", [(1, 0.3, 0.5), (10, 0.1, 1.0), (50, 0.5, 2.0)])
    def test_exp_decay_lambert_oracle(self, n, beta, x):
        exact = oracles.jain_exp_decay(n, beta, x)
        assert apply_jain(EXP, OperatorParams(n, beta), x, TIGHT) == pytest.approx(float(exact), rel=1e-12)


class TestSzasz:
    def test_second_moment(self):
        assert apply_szasz(T2, 10, 1.0) == pytest.approx(1.1, rel=1e-13)

    def test_constant(self):
        assert apply_szasz(ONE, 3, 4.0) == pytest.approx(1.0, abs=1e-12)

    def test_exp_decay_against_poisson_sum(self):
        ks = np.arange(0, 400)
        terms = [mp.e ** (-50) * mp.mpf(50) ** int(k) / mp.factorial(int(k)) * mp.e ** (-mp.mpf(int(k)) / 50)
                 for k in ks]
        assert apply_szasz(EXP, 50, 1.0) == pytest.approx(float(mp.fsum(terms)), abs=1e-12)

    def test_large_argument(self):
        # alpha = 1e6: the window must sit far from k = 0
        assert apply_szasz(T, 1000, 1000.0) == pytest.approx(1000.0, rel=1e-13)


def _coeff_poly(c):
    return parse_function("poly:" + ",".join(repr(float(v)) for v in c))


params_st = st.builds(OperatorParams, n=st.integers(1, 200), beta=st.floats(0.0, 0.9))
x_st = st.floats(0.0, 20.0)


@settings(max_examples=40, deadline=None)
@given(params=params_st, x=x_st, a=st.floats(-5, 5), b=st.floats(-5, 5))
def test_linearity(params, x, a, b):
    f, g = EXP, parse_function("sin")
    combo = parse_function("sin")
    lhs = a * apply_p(f, params, x, TIGHT) + b * apply_p(g, params, x, TIGHT)
    mixed = type(combo)(name="mix", eval=lambda t: a * np.exp(-t) + b * np.sin(t), sup_norm=abs(a) + abs(b))
    assert apply_p(mixed, params, x, TIGHT) == pytest.approx(lhs, abs=1e-12 * (1 + abs(a) + abs(b)))


@settings(max_examples=40, deadline=None)
@given(params=params_st, x=x_st, c=st.floats(0.0, 10.0))
def test_positivity(params, x, c):
    assert apply_p(parse_function(f"abs:{c!r}"), params, x) >= 0.0
    assert apply_jain(parse_function(f"abs:{c!r}"), params, x) >= 0.0


@settings(max_examples=40, deadline=None)
@given(params=params_st, x=x_st)
def test_monotonicity(params, x):
    # e^-t <= 1 pointwise, so P e^-t <= P 1
    lo = apply_p(EXP, params, x, TIGHT)
    hi = apply_p(ONE, params, x, TIGHT)
    assert lo <= hi + 1e-14
    assert 0.0 < lo


@settings(max_examples=40, deadline=None)
@given(params=params_st, x=x_st, c=st.floats(-100, 100))
def test_constants_preserved(params, x, c):
    f = _coeff_poly([c])
    assert apply_p(f, params, x, TIGHT) == pytest.approx(c, abs=1e-12 * max(1.0, abs(c)))
    assert apply_jain(f, params, x, TIGHT) == pytest.approx(c, abs=1e-12 * max(1.0, abs(c)))


@pytest.mark.parametrize("beta", [0.1, 0.5])
@pytest.mark.parametrize("n", [10, 100])
def test_first_moment_contrast_at_origin(n, beta):
    p = OperatorParams(n, beta)
    assert apply_p(T, p, 0.0, TIGHT) == pytest.approx(beta / (n * (1 - beta) ** 2), abs=1e-12)
    assert abs(apply_jain(T, p, 0.0, TIGHT)) <= 1e-12


def test_jain_identity_is_linear_in_x():
    p = OperatorParams(20, 0.4)
    vals = [apply_jain(T, p, x, TIGHT) for x in (0.5, 1.0, 2.0)]
    assert vals[1] / 1.0 == pytest.approx(vals[0] / 0.5, rel=1e-12)
    assert vals[2] / 2.0 == pytest.approx(1 / 0.6, rel=1e-12)
    assert math.isfinite(vals[0])
