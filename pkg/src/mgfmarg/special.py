"""Special functions underlying the mgf derivatives and oracles.

The upper incomplete gamma function is needed for *any* real order,
including strongly negative orders at large arguments (e.g. order about
-74 at z around 350 for the Pareto-prior pump marginal).  Recurrence
chains lose digits badly in that regime, so it is evaluated by adaptive
log-domain quadrature of the defining integral, which is uniformly stable
at these scales.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .quadrature import log_quad_semiinf
from .signedlog import SignedLogReal

__all__ = [
    "log_gamma",
    "upper_incomplete_gamma",
    "exp_integral_E",
    "exp_integral_E_quad",
    "log_poisson_pmf",
    "log_negbin_pmf",
]


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def upper_incomplete_gamma(s: float, z: float, *, tol: float = 1e-13) -> SignedLogReal:
    """Gamma(s, z) = integral_z^inf t^(s-1) e^(-t) dt for z > 0, any real s.

    Always positive for z > 0; returned on the signed-log scale since the
    value underflows double precision already at moderate z.
    """
    if not z > 0:
        raise DomainError(f"upper incomplete gamma requires z > 0, got {z}")

    def log_integrand(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (s - 1.0) * np.log(t) - t
        return np.where(t > 0, out, -np.inf)

    res = log_quad_semiinf(log_integrand, z, tol=tol)
    return SignedLogReal.from_log(res.log_value, 1)


def exp_integral_E(nu: float, z: float, *, tol: float = 1e-13) -> SignedLogReal:
    """Generalized exponential integral E_nu(z) = z^(nu-1) Gamma(1-nu, z)."""
    if not z > 0:
        raise DomainError(f"exp_integral_E requires z > 0, got {z}")
    g = upper_incomplete_gamma(1.0 - nu, z, tol=tol)
    return g.scale_log((nu - 1.0) * math.log(z))


def exp_integral_E_quad(nu: float, z: float, *, tol: float = 1e-13) -> SignedLogReal:
    """E_nu(z) by direct quadrature of integral_1^inf e^(-z t) t^(-nu) dt.

    Independent route kept alongside :func:`exp_integral_E` so the two can
    be cross-checked.
    """
    if not z > 0:
        raise DomainError(f"exp_integral_E_quad requires z > 0, got {z}")

    def log_integrand(t):
        t = np.asarray(t, dtype=float)
        return -z * t - nu * np.log(t)

    res = log_quad_semiinf(log_integrand, 1.0, tol=tol)
    return SignedLogReal.from_log(res.log_value, 1)


def log_poisson_pmf(y: int, rate: float) -> float:
    """Log Poisson(rate) mass at the count y."""
    if not rate > 0:
        raise DomainError(f"Poisson rate must be positive, got {rate}")
    if y < 0 or y != int(y):
        raise DomainError(f"Poisson count must be a nonnegative integer, got {y}")
    return y * math.log(rate) - rate - math.lgamma(y + 1)


def log_negbin_pmf(y: int, size: float, prob: float) -> float:
    """Log NegBin(size, prob) mass at y (prob = success probability)."""
    if not size > 0:
        raise DomainError(f"negative binomial size must be positive, got {size}")
    if not 0 < prob < 1:
        raise DomainError(f"negative binomial prob must lie in (0,1), got {prob}")
    if y < 0 or y != int(y):
        raise DomainError(f"count must be a nonnegative integer, got {y}")
    return (math.lgamma(y + size) - math.lgamma(size) - math.lgamma(y + 1)
            + size * math.log(prob) + y * math.log1p(-prob))
