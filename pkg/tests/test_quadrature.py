import math

import numpy as np
import pytest

from mgfmarg.errors import QuadratureError
from mgfmarg.quadrature import log_quad, log_quad_semiinf


def test_gaussian_integral():
    res = log_quad(lambda x: -0.5 * np.asarray(x) ** 2, -40.0, 40.0)
    assert res.log_value == pytest.approx(0.5 * math.log(2 * math.pi), abs=1e-12)


def test_semiinf_exponential():
    res = log_quad_semiinf(lambda t: -3.0 * np.asarray(t), 2.0)
    # integral_2^inf e^{-3t} dt = e^{-6}/3
    assert res.log_value == pytest.approx(-6.0 - math.log(3.0), abs=1e-12)


def test_underflowing_scale():
    # integral_500^inf e^{-t} dt = e^{-500}, far below linear-scale doubles
    res = log_quad_semiinf(lambda t: -np.asarray(t, dtype=float), 500.0)
    assert res.log_value == pytest.approx(-500.0, abs=1e-12)


def test_endpoint_singularity():
    # integral_0^1 x^{-1/2} dx = 2
    def log_f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return -0.5 * np.log(x)
    res = log_quad(log_f, 0.0, 1.0)
    assert res.log_value == pytest.approx(math.log(2.0), abs=1e-10)


def test_zero_integrand():
    res = log_quad(lambda x: np.full_like(np.asarray(x, dtype=float), -np.inf),
                   0.0, 1.0)
    assert res.log_value == -math.inf


def test_scalar_callable_mode():
    res = log_quad(lambda x: -x * x * 0.5, -10.0, 10.0, vectorized=False)
    assert res.log_value == pytest.approx(0.5 * math.log(2 * math.pi), abs=1e-10)


def test_error_estimate_is_honest():
    res = log_quad(lambda x: np.sin(np.asarray(x)) * 0.0 - np.asarray(x) ** 2, -5, 5)
    true = 0.5 * math.log(math.pi / 2) / 1  # integral e^{-x^2} = sqrt(pi)
    true = 0.5 * math.log(math.pi)
    assert abs(res.log_value - true) <= 10 * math.exp(res.log_abs_err - res.log_value)


def test_subdivision_budget_error():
    def log_f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.log(x)  # 1/x: divergent at 0
    with pytest.raises(QuadratureError):
        log_quad(log_f, 0.0, 1.0, max_segments=256)


def test_nan_is_reported_not_silent():
    def log_f(x):
        return np.full_like(np.asarray(x, dtype=float), np.nan)
    with pytest.raises(QuadratureError):
        log_quad(log_f, 0.0, 1.0)


def test_inverted_interval_rejected():
    with pytest.raises(ValueError):
        log_quad(lambda x: np.zeros_like(np.asarray(x, dtype=float)), 1.0, 0.0)
