import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mgfmarg.signedlog import ONE, ZERO, SignedLogReal, signed_logsumexp, slr_sum

finite_nonzero = st.floats(min_value=1e-300, max_value=1e300).flatmap(
    lambda m: st.sampled_from([m, -m]))


def test_zero_sign_invariant():
    z = SignedLogReal(5.0, 0)
    assert z.sign == 0 and z.log_magnitude == -math.inf
    assert SignedLogReal.from_real(0.0) == ZERO
    assert ZERO.is_zero and not ONE.is_zero


@given(finite_nonzero)
def test_round_trip(x):
    # exp(log(x)) is exact to ~|log x| * eps in doubles, ~8e-14 worst case
    assert SignedLogReal.from_real(x).to_real() == pytest.approx(x, rel=1e-12)
    assert SignedLogReal.from_real(x).sign == (1 if x > 0 else -1)


@given(finite_nonzero, finite_nonzero)
@settings(max_examples=200)
def test_mul_matches_floats(a, b):
    got = (SignedLogReal.from_real(a) * SignedLogReal.from_real(b)).to_real()
    want = a * b
    if want == 0 or math.isinf(want):
        return  # outside the exponent range of the float product
    assert got == pytest.approx(want, rel=1e-12)


@given(st.floats(min_value=-1e6, max_value=1e6),
       st.floats(min_value=-1e6, max_value=1e6))
@settings(max_examples=200)
def test_add_matches_floats(a, b):
    got = (SignedLogReal.from_real(a) + SignedLogReal.from_real(b)).to_real()
    want = a + b
    if want == 0:
        assert abs(got) <= 1e-9 * max(abs(a), abs(b), 1.0)
    else:
        assert got == pytest.approx(want, rel=1e-9, abs=1e-12 * max(abs(a), abs(b)))


def test_exact_cancellation():
    x = SignedLogReal.from_real(3.7)
    assert (x - x) == ZERO
    assert (x + (-x)).sign == 0


def test_add_zero_identity():
    x = SignedLogReal.from_real(-2.5)
    assert (x + ZERO) == x
    assert (ZERO + x) == x


def test_division():
    x = SignedLogReal.from_real(6.0) / SignedLogReal.from_real(-2.0)
    assert x.to_real() == pytest.approx(-3.0)
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_pow_int_sign():
    x = SignedLogReal.from_real(-2.0)
    assert x.pow_int(3).to_real() == pytest.approx(-8.0)
    assert x.pow_int(2).to_real() == pytest.approx(4.0)
    assert x.pow_int(0) == ONE
    assert ZERO.pow_int(4) == ZERO


def test_pow_real_requires_positive():
    with pytest.raises(ValueError):
        SignedLogReal.from_real(-1.0).pow_real(0.5)
    assert SignedLogReal.from_real(4.0).pow_real(0.5).to_real() == pytest.approx(2.0)


def test_extreme_scale_product():
    tiny = SignedLogReal.from_log(-5000.0, 1)
    huge = SignedLogReal.from_log(4990.0, 1)
    assert (tiny * huge).log_magnitude == pytest.approx(-10.0)


def test_signed_logsumexp_mixed_signs():
    vals = np.array([2.0, -1.5, 0.25, -0.75])
    terms = [SignedLogReal.from_real(v) for v in vals]
    assert slr_sum(terms).to_real() == pytest.approx(vals.sum(), rel=1e-12)
    logs = np.log(np.abs(vals))
    signs = np.sign(vals).astype(int)
    assert signed_logsumexp(logs, signs).to_real() == pytest.approx(vals.sum(), rel=1e-12)


def test_signed_logsumexp_empty():
    assert signed_logsumexp(np.array([]), np.array([])) == ZERO
