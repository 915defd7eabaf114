"""Log marginal likelihoods for Poisson and gamma likelihoods via mgf derivatives.

Dispatch, in order of preference:

* ``closed-form``   -- one prior per observation (identity map), every factor
  a closed-form derivative;
* ``separable-deriv`` -- a general linear map in which every observation
  still touches exactly one latent variable, so the mixed partial splits
  into univariate derivatives with chain-rule coefficients;
* ``dense-series``  -- genuinely coupled linear maps, handled by truncated
  power-series arithmetic;
* ``mellin-frac``   -- any fractional differentiation order (gamma
  likelihoods with non-integer shapes).

All prefactors (1/y!, y^(alpha-1), scale powers, Gammas) accumulate in log
space before they meet the derivative values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, SeriesSizeError
from .mgf import FracOrder, GammaPrior, ExponentialPrior, PointMass, PriorMgf
from .series import MAX_TOTAL_ORDER, TruncatedSeries, mixed_partial
from .signedlog import ONE, SignedLogReal

__all__ = [
    "Path",
    "MarginalResult",
    "PoissonProblem",
    "GammaProblem",
    "poisson_hier",
    "poisson_scaled",
    "poisson_single",
    "gamma_hier",
    "gamma_single",
    "gamma_integer",
]

_FORM_AGREEMENT = 1e-10


class Path(str, Enum):
    CLOSED_FORM = "closed-form"
    SEPARABLE_DERIV = "separable-deriv"
    DENSE_SERIES = "dense-series"
    MELLIN_FRAC = "mellin-frac"


@dataclass(frozen=True)
class MarginalResult:
    """A log marginal likelihood plus how it was computed."""

    log_value: float
    path: Path
    orders_used: tuple
    sign: int = 1

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log_value)


def _as_1d(x, name: str, dtype=float) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=dtype))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


def _check_counts(y) -> np.ndarray:
    y = np.atleast_1d(np.asarray(y))
    if y.ndim != 1:
        raise ValueError(f"counts must be a vector, got shape {y.shape}")
    if not np.all(y == np.floor(y)) or np.any(y < 0):
        raise ValueError(f"counts must be nonnegative integers, got {y}")
    return y.astype(np.int64)


@dataclass(frozen=True)
class PoissonProblem:
    """y_j ~ Poisson(zeta_j * (r theta)_j) with independent theta_i ~ priors[i]."""

    priors: tuple
    y: np.ndarray
    r: Optional[np.ndarray] = None
    zeta: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "priors", tuple(self.priors))
        y = _check_counts(self.y)
        object.__setattr__(self, "y", y)
        m, n = len(y), len(self.priors)
        if self.r is not None:
            r = np.asarray(self.r, dtype=float)
            if r.shape != (m, n):
                raise ValueError(f"r must be {m}x{n}, got {r.shape}")
            if np.any(r < 0):
                raise DomainError(
                    "negative entries in r would let the rates go negative "
                    "over the prior support")
            n_random = sum(1 for p in self.priors if not isinstance(p, PointMass))
            if m < n_random:
                raise ValueError(
                    f"more latent variables than observations ({n_random} > {m})")
            object.__setattr__(self, "r", r)
        elif m != n:
            raise ValueError(f"{n} priors for {m} observations requires an r matrix")
        if self.zeta is not None:
            z = _as_1d(self.zeta, "zeta")
            if len(z) != m:
                raise ValueError(f"zeta must have length {m}, got {len(z)}")
            if not np.all(z > 0):
                raise DomainError("all zeta entries must be positive")
            object.__setattr__(self, "zeta", z)

    @property
    def r_matrix(self) -> np.ndarray:
        return np.eye(len(self.y)) if self.r is None else self.r

    @property
    def zeta_vec(self) -> np.ndarray:
        return np.ones(len(self.y)) if self.zeta is None else self.zeta


@dataclass(frozen=True)
class GammaProblem:
    """y_j ~ Gamma(alpha_j, zeta_j * (r theta)_j) with independent theta priors.

    Non-integer shapes force a diagonal r (one observation per latent
    variable): fractional derivative operators do not obey the chain rule
    needed to push them through a genuine linear coupling.
    """

    priors: tuple
    alpha: np.ndarray
    y: np.ndarray
    r: Optional[np.ndarray] = None
    zeta: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "priors", tuple(self.priors))
        y = _as_1d(self.y, "y")
        if not np.all(y > 0):
            raise DomainError(f"gamma observations must be positive, got {y}")
        object.__setattr__(self, "y", y)
        m, n = len(y), len(self.priors)
        alpha = _as_1d(self.alpha, "alpha")
        if len(alpha) == 1 and m > 1:
            alpha = np.full(m, alpha[0])
        if len(alpha) != m:
            raise ValueError(f"alpha must have length {m}, got {len(alpha)}")
        if not np.all(alpha > 0):
            raise ValueError(f"shape parameters must be positive, got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        if self.r is not None:
            r = np.asarray(self.r, dtype=float)
            if r.shape != (m, n):
                raise ValueError(f"r must be {m}x{n}, got {r.shape}")
            if np.any(r < 0):
                raise DomainError(
                    "negative entries in r would let the rates go negative "
                    "over the prior support")
            object.__setattr__(self, "r", r)
        elif m != n:
            raise ValueError(f"{n} priors for {m} observations requires an r matrix")
        if not self.all_integer_shapes:
            if m != n:
                raise ValueError("non-integer shapes require one prior per observation")
            if self.r is not None and np.any(self.r != np.diag(np.diag(self.r))):
                raise ValueError("non-integer shapes require a diagonal r")
        if self.zeta is not None:
            z = _as_1d(self.zeta, "zeta")
            if len(z) != m:
                raise ValueError(f"zeta must have length {m}, got {len(z)}")
            if not np.all(z > 0):
                raise DomainError("all zeta entries must be positive")
            object.__setattr__(self, "zeta", z)

    @property
    def all_integer_shapes(self) -> bool:
        return bool(np.all(self.alpha == np.floor(self.alpha)))

    @property
    def r_matrix(self) -> np.ndarray:
        return np.eye(len(self.y)) if self.r is None else self.r

    @property
    def zeta_vec(self) -> np.ndarray:
        return np.ones(len(self.y)) if self.zeta is None else self.zeta


# ----------------------------------------------------------------------
# mixed partials of prod_i M_i((t^T r)_i)

def _lift_prior(prior: PriorMgf, const: float, lin: Sequence[float],
                max_orders: Sequence[int]) -> TruncatedSeries:
    """Taylor-expand M(u) along the affine argument u = const + sum lin_j dt_j."""
    if isinstance(prior, (GammaPrior, ExponentialPrior)):
        shape = prior.shape if isinstance(prior, GammaPrior) else 1.0
        rate = prior.rate
        base = TruncatedSeries.affine(rate - const, [-c for c in lin], max_orders)
        return base.pow_real(-shape).scale(
            SignedLogReal.from_log(shape * math.log(rate), 1))
    if isinstance(prior, PointMass):
        c = prior.location
        return TruncatedSeries.affine(c * const, [c * v for v in lin], max_orders).exp()
    # Generic family: compose its univariate Taylor coefficients with the
    # linear part (exact, since the inner series has no constant term).
    total = int(sum(max_orders))
    coeffs = [prior.deriv_int(k, const).scale_log(-math.lgamma(k + 1))
              for k in range(total + 1)]
    linear = TruncatedSeries.affine(0.0, list(lin), max_orders)
    return linear.compose_taylor(coeffs)


def _product_mixed_partial(priors: Sequence[PriorMgf], r: np.ndarray,
                           point: np.ndarray, orders: np.ndarray,
                           force_dense: bool = False):
    """d^orders of prod_i M_i((t^T r)_i) at t = point.

    Returns (value, path, orders_used).  ``force_dense`` routes even
    separable structures through the series machinery (used to cross-check
    the two paths against each other).
    """
    m, n = r.shape
    u = r.T @ point  # per-factor mgf arguments
    for i, prior in enumerate(priors):
        prior.require_domain(float(u[i]))

    nonzero_cols = [np.flatnonzero(r[j]) for j in range(m)]
    for j, cols in enumerate(nonzero_cols):
        if len(cols) == 0 and orders[j] > 0:
            raise DomainError(
                f"observation {j} has an all-zero r row: its rate is "
                "identically zero, which no Poisson/gamma likelihood allows")

    if not force_dense and all(len(cols) <= 1 for cols in nonzero_cols):
        # Chain rule through each univariate composition M_i(sum r_ji t_j).
        factor_orders = np.zeros(n, dtype=np.int64)
        coeff = ONE
        for j, cols in enumerate(nonzero_cols):
            if len(cols) == 0:
                continue
            i = int(cols[0])
            factor_orders[i] += orders[j]
            coeff = coeff * SignedLogReal.from_real(float(r[j, i])).pow_int(int(orders[j]))
        value = coeff
        for i, prior in enumerate(priors):
            value = value * prior.deriv_int(int(factor_orders[i]), float(u[i]))
        identity = r.shape[0] == r.shape[1] and np.array_equal(r, np.eye(m))
        path = Path.CLOSED_FORM if identity else Path.SEPARABLE_DERIV
        return value, path, tuple(int(k) for k in factor_orders)

    total = int(np.sum(orders))
    if total > MAX_TOTAL_ORDER:
        raise SeriesSizeError(
            f"dense mixed partial of total order {total} exceeds the guard "
            f"({MAX_TOTAL_ORDER}); reformulate the problem separably")
    max_orders = [int(o) for o in orders]
    composite = None
    for i, prior in enumerate(priors):
        factor = _lift_prior(prior, float(u[i]), [float(r[j, i]) for j in range(m)],
                             max_orders)
        composite = factor if composite is None else composite * factor
    value = mixed_partial(composite, max_orders)
    return value, Path.DENSE_SERIES, tuple(max_orders)


def _finalize(log_prefactor: float, value: SignedLogReal, path: Path,
              orders_used: tuple) -> MarginalResult:
    if value.sign <= 0:
        raise ConsistencyError(
            "marginal likelihood came out non-positive; the derivative "
            "evaluation lost all significance")
    return MarginalResult(log_value=log_prefactor + value.log_magnitude,
                          path=path, orders_used=orders_used)


# ----------------------------------------------------------------------
# Poisson likelihoods

def poisson_hier(problem: PoissonProblem) -> MarginalResult:
    """One Poisson observation per independent prior, unit rates.

    p(y | xi) = [prod 1/y_i!] * prod_i M_i^(y_i)(-1).
    """
    if problem.r is not None and not np.array_equal(problem.r, np.eye(len(problem.y))):
        raise ValueError("poisson_hier requires an identity map; use poisson_scaled")
    if problem.zeta is not None and not np.all(problem.zeta == 1.0):
        raise ValueError("poisson_hier requires unit scalings; use poisson_scaled")
    log_pref = -sum(math.lgamma(int(k) + 1) for k in problem.y)
    value = ONE
    for prior, k in zip(problem.priors, problem.y):
        value = value * prior.deriv_int(int(k), -1.0)
    return _finalize(log_pref, value, Path.CLOSED_FORM,
                     tuple(int(k) for k in problem.y))


def poisson_scaled(problem: PoissonProblem) -> MarginalResult:
    """Scaled/linearly-mapped Poisson rates: y_j ~ Poisson(zeta_j (r theta)_j).

    p(y | xi) = [prod zeta_j^{y_j}/y_j!] * mixed partial of
    prod_i M_i((t^T r)_i) at t = -zeta.
    """
    zeta = problem.zeta_vec
    y = problem.y
    log_pref = float(np.sum(y * np.log(zeta)) - sum(math.lgamma(int(k) + 1) for k in y))
    value, path, orders = _product_mixed_partial(
        problem.priors, problem.r_matrix, -zeta, y)
    return _finalize(log_pref, value, path, orders)


def poisson_single(prior: PriorMgf, y, zeta: float = 1.0) -> MarginalResult:
    """An iid Poisson sample driven by a single scaled rate parameter.

    Computes both displayed forms -- zeta^K M^(K)(-n zeta) and the K-th
    derivative of M(t zeta) at t = -n -- and insists they agree.
    """
    y = _check_counts(y)
    if not zeta > 0:
        raise DomainError(f"zeta must be positive, got {zeta}")
    n, total = len(y), int(np.sum(y))
    log_pref = -sum(math.lgamma(int(k) + 1) for k in y)

    form_scaled_point = prior.deriv_int(total, -n * zeta).scale_log(
        total * math.log(zeta))
    form_scaled_prior = prior.scaled(zeta).deriv_int(total, float(-n))
    _require_agreement(form_scaled_point, form_scaled_prior, "poisson_single")
    return _finalize(log_pref, form_scaled_point, Path.CLOSED_FORM, (total,))


def _require_agreement(a: SignedLogReal, b: SignedLogReal, what: str,
                       tol: float = _FORM_AGREEMENT) -> None:
    if a.sign != b.sign:
        raise ConsistencyError(f"{what}: dual forms disagree in sign")
    if a.sign == 0:
        return
    if abs(a.log_magnitude - b.log_magnitude) > tol:
        raise ConsistencyError(
            f"{what}: dual forms disagree beyond {tol:g} "
            f"({a.log_magnitude} vs {b.log_magnitude})")


# ----------------------------------------------------------------------
# gamma likelihoods

def gamma_hier(problem: GammaProblem) -> MarginalResult:
    """One gamma observation per prior through a diagonal scaling.

    p(y | xi) = prod_i [y_i^(alpha_i - 1)/Gamma(alpha_i)] s_i^alpha_i
    (D^alpha_i M_i)(-s_i y_i) with s = diag(r) * zeta.
    """
    m = len(problem.y)
    if len(problem.priors) != m:
        raise ValueError("gamma_hier requires one prior per observation")
    r = problem.r_matrix
    if np.any(r != np.diag(np.diag(r))):
        raise ValueError("gamma_hier requires a diagonal r; use gamma_integer")
    s = np.diag(r) * problem.zeta_vec
    if not np.all(s > 0):
        raise DomainError("diagonal scalings must be positive")

    log_pref = 0.0
    value = ONE
    orders = []
    fractional = False
    for i in range(m):
        a_i, y_i, s_i = float(problem.alpha[i]), float(problem.y[i]), float(s[i])
        order = FracOrder.from_total(a_i)
        fractional = fractional or not order.is_integer
        log_pref += (a_i - 1.0) * math.log(y_i) - math.lgamma(a_i) + a_i * math.log(s_i)
        value = value * problem.priors[i].deriv_frac(order, -s_i * y_i)
        orders.append(a_i)
    path = Path.MELLIN_FRAC if fractional else (
        Path.CLOSED_FORM if problem.r is None and problem.zeta is None
        else Path.SEPARABLE_DERIV)
    return _finalize(log_pref, value, path, tuple(orders))


def gamma_single(prior: PriorMgf, alpha: float, y, r: float = 1.0) -> MarginalResult:
    """An iid gamma sample whose rate is a single scaled parameter.

    Needs the n*alpha-order fractional derivative at -r*sum(y); both scaled
    forms are computed and must agree.
    """
    y = _as_1d(y, "y")
    if not np.all(y > 0):
        raise DomainError(f"gamma observations must be positive, got {y}")
    if not alpha > 0:
        raise ValueError(f"shape must be positive, got {alpha}")
    if not r > 0:
        raise DomainError(f"scale must be positive, got {r}")
    n, total_y = len(y), float(np.sum(y))
    order = FracOrder.from_total(n * alpha)
    log_pref = float((alpha - 1.0) * np.sum(np.log(y))) - n * math.lgamma(alpha)

    form_scaled_point = prior.deriv_frac(order, -r * total_y).scale_log(
        order.total * math.log(r))
    form_scaled_prior = prior.scaled(r).deriv_frac(order, -total_y)
    _require_agreement(form_scaled_point, form_scaled_prior, "gamma_single")
    path = Path.CLOSED_FORM if order.is_integer else Path.MELLIN_FRAC
    return _finalize(log_pref, form_scaled_point, path, (order.total,))


def gamma_integer(problem: GammaProblem) -> MarginalResult:
    """Integer shapes through a general linear map (regression structure).

    p(y | xi) = [prod_j y_j^(alpha_j-1) zeta_j^(alpha_j) / Gamma(alpha_j)]
    * mixed d^alpha of prod_i M_i((t^T r)_i) at t = -y * zeta.
    """
    if not problem.all_integer_shapes:
        raise ValueError("gamma_integer requires integer shape parameters")
    if np.any(problem.alpha < 1):
        raise DomainError(
            "shape 0 makes the gamma likelihood undefined (y^(-1)/Gamma(0))")
    y, zeta = problem.y, problem.zeta_vec
    alpha = problem.alpha.astype(np.int64)
    log_pref = float(np.sum((alpha - 1) * np.log(y) + alpha * np.log(zeta)
                            - [math.lgamma(float(a)) for a in alpha]))
    value, path, orders = _product_mixed_partial(
        problem.priors, problem.r_matrix, -(y * zeta), alpha)
    return _finalize(log_pref, value, path, orders)
