"""Dense multivariate truncated power series in signed-log arithmetic.

These series evaluate mixed high-order partials of products of univariate
mgfs composed with a linear map: each factor is lifted through its affine
argument, factors are multiplied with truncated Cauchy products, and the
target mixed partial is a single coefficient times factorials.  Coefficient
tensors are dense; problems large enough to need sparsity take the separable
fast path upstream and never build a tensor.

Coefficients live in signed-log space (log magnitude + sign tensors),
accumulated with two-bucket log-sum-exp, because they span many orders of
magnitude at high differentiation order.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import (NonPositiveConstantTermError, SeriesSizeError,
                     ShapeMismatchError)
from .signedlog import SignedLogReal, signed_logsumexp

__all__ = ["TruncatedSeries", "mixed_partial", "MAX_TENSOR_ENTRIES", "MAX_TOTAL_ORDER"]

MAX_TENSOR_ENTRIES = 10 ** 7
MAX_TOTAL_ORDER = 64


class TruncatedSeries:
    """Taylor coefficients around an expansion point, truncated per variable.

    ``max_orders[j]`` is the highest power of variable j retained; the
    coefficient tensor has shape ``tuple(o + 1 for o in max_orders)``.
    Instances are immutable; all operations return new series.
    """

    __slots__ = ("max_orders", "log_mag", "sign")

    def __init__(self, max_orders: Sequence[int], log_mag: np.ndarray,
                 sign: np.ndarray):
        self.max_orders = tuple(int(o) for o in max_orders)
        shape = _checked_shape(self.max_orders)
        if log_mag.shape != shape or sign.shape != shape:
            raise ShapeMismatchError(
                f"coefficient tensors {log_mag.shape} do not match orders {shape}")
        self.log_mag = log_mag
        self.sign = sign

    # ------------------------------------------------------------------
    # constructors
    @classmethod
    def zeros(cls, max_orders: Sequence[int]) -> "TruncatedSeries":
        shape = _checked_shape(tuple(int(o) for o in max_orders))
        return cls(max_orders, np.full(shape, -np.inf), np.zeros(shape, dtype=np.int8))

    @classmethod
    def constant(cls, value, max_orders: Sequence[int]) -> "TruncatedSeries":
        s = cls.zeros(max_orders)
        v = _as_slr(value)
        idx = (0,) * len(s.max_orders)
        s.log_mag[idx] = v.log_magnitude
        s.sign[idx] = v.sign
        return s

    @classmethod
    def variable(cls, j: int, value, max_orders: Sequence[int]) -> "TruncatedSeries":
        """The affine series value + dt_j."""
        s = cls.constant(value, max_orders)
        if not 0 <= j < len(s.max_orders):
            raise IndexError(f"variable index {j} out of range for dims {len(s.max_orders)}")
        if s.max_orders[j] >= 1:
            idx = tuple(1 if d == j else 0 for d in range(len(s.max_orders)))
            s.log_mag[idx] = 0.0
            s.sign[idx] = 1
        return s

    @classmethod
    def affine(cls, const, lin_coeffs: Sequence[float],
               max_orders: Sequence[int]) -> "TruncatedSeries":
        """const + sum_j lin_coeffs[j] * dt_j."""
        if len(lin_coeffs) != len(max_orders):
            raise ShapeMismatchError("one linear coefficient per variable required")
        s = cls.constant(const, max_orders)
        for j, c in enumerate(lin_coeffs):
            if c == 0 or s.max_orders[j] == 0:
                continue
            v = SignedLogReal.from_real(float(c))
            idx = tuple(1 if d == j else 0 for d in range(len(s.max_orders)))
            s.log_mag[idx] = v.log_magnitude
            s.sign[idx] = v.sign
        return s

    # ------------------------------------------------------------------
    @property
    def dims(self) -> int:
        return len(self.max_orders)

    def coeff(self, idx: Sequence[int]) -> SignedLogReal:
        idx = tuple(int(i) for i in idx)
        return SignedLogReal.from_log(float(self.log_mag[idx]), int(self.sign[idx]))

    def value(self) -> SignedLogReal:
        """Function value at the expansion point (the order-zero coefficient)."""
        return self.coeff((0,) * self.dims)

    def _check_match(self, other: "TruncatedSeries") -> None:
        if self.max_orders != other.max_orders:
            raise ShapeMismatchError(
                f"order mismatch: {self.max_orders} vs {other.max_orders}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_match(other)
        out = TruncatedSeries.zeros(self.max_orders)
        for idx in np.ndindex(*self.log_mag.shape):
            v = self.coeff(idx) + other.coeff(idx)
            out.log_mag[idx] = v.log_magnitude
            out.sign[idx] = v.sign
        return out

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.max_orders, self.log_mag.copy(), -self.sign)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def scale(self, factor) -> "TruncatedSeries":
        f = _as_slr(factor)
        if f.sign == 0:
            return TruncatedSeries.zeros(self.max_orders)
        return TruncatedSeries(self.max_orders, self.log_mag + f.log_magnitude,
                               self.sign * f.sign)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """Truncated Cauchy product."""
        self._check_match(other)
        out = TruncatedSeries.zeros(self.max_orders)
        for idx in np.ndindex(*self.log_mag.shape):
            block = tuple(slice(0, i + 1) for i in idx)
            a_log, a_sign = self.log_mag[block], self.sign[block]
            b_log = np.flip(other.log_mag[block])
            b_sign = np.flip(other.sign[block])
            v = signed_logsumexp((a_log + b_log).ravel(),
                                 (a_sign * b_sign).ravel())
            out.log_mag[idx] = v.log_magnitude
            out.sign[idx] = v.sign
        return out

    def pow_real(self, p: float) -> "TruncatedSeries":
        """Real power of the series; needs a strictly positive constant term.

        Uses the Euler-operator recurrence for powers of a power series
        (the multivariate form of the classical univariate one): writing
        c = a^p, matching coefficients of a * (E c) = p (E a) * c with
        E the degree-weighting operator gives, for every multi-index k,
        c_k = sum_{0<i<=k} ((p+1)|i| - |k|) a_i c_{k-i} / (|k| a_0).
        """
        c0 = self.value()
        if c0.sign <= 0:
            raise NonPositiveConstantTermError(
                "series power requires a strictly positive constant term")
        out = TruncatedSeries.zeros(self.max_orders)
        zero = (0,) * self.dims
        out.log_mag[zero] = p * c0.log_magnitude
        out.sign[zero] = 1
        for idx in _by_total_degree(self.log_mag.shape):
            k_tot = sum(idx)
            if k_tot == 0:
                continue
            logs, signs = [], []
            for sub in np.ndindex(*(i + 1 for i in idx)):
                i_tot = sum(sub)
                if i_tot == 0:
                    continue
                w = (p + 1.0) * i_tot - k_tot
                if w == 0:
                    continue
                rem = tuple(k - s for k, s in zip(idx, sub))
                term_log = (math.log(abs(w)) + self.log_mag[sub]
                            + out.log_mag[rem])
                term_sign = ((1 if w > 0 else -1) * self.sign[sub]
                             * out.sign[rem])
                logs.append(term_log)
                signs.append(term_sign)
            v = signed_logsumexp(np.array(logs), np.array(signs))
            v = v.scale_log(-math.log(k_tot) - c0.log_magnitude)
            out.log_mag[idx] = v.log_magnitude
            out.sign[idx] = v.sign
        return out

    def exp(self) -> "TruncatedSeries":
        """exp of the series; the constant term must fit the linear scale.

        Same Euler-operator scheme as :meth:`pow_real`: for c = exp(a),
        |k| c_k = sum_{0<i<=k} |i| a_i c_{k-i}.
        """
        c0 = self.value().to_real()
        if not math.isfinite(c0):
            raise OverflowError("exp of series constant term overflows")
        out = TruncatedSeries.zeros(self.max_orders)
        zero = (0,) * self.dims
        out.log_mag[zero] = c0
        out.sign[zero] = 1
        for idx in _by_total_degree(self.log_mag.shape):
            k_tot = sum(idx)
            if k_tot == 0:
                continue
            logs, signs = [], []
            for sub in np.ndindex(*(i + 1 for i in idx)):
                i_tot = sum(sub)
                if i_tot == 0:
                    continue
                rem = tuple(k - s for k, s in zip(idx, sub))
                logs.append(math.log(i_tot) + self.log_mag[sub] + out.log_mag[rem])
                signs.append(self.sign[sub] * out.sign[rem])
            v = signed_logsumexp(np.array(logs), np.array(signs))
            v = v.scale_log(-math.log(k_tot))
            out.log_mag[idx] = v.log_magnitude
            out.sign[idx] = v.sign
        return out

    def compose_taylor(self, coeff_values: Sequence[SignedLogReal]) -> "TruncatedSeries":
        """sum_j coeff_values[j] * self^j by Horner's scheme.

        ``self`` must have a zero constant term (the composition is then
        exact under truncation).  Used to lift an mgf lacking a convenient
        algebraic form through an affine argument from its own Taylor
        coefficients.
        """
        if self.value().sign != 0:
            raise ValueError("composition requires a zero constant term")
        acc = TruncatedSeries.constant(coeff_values[-1], self.max_orders)
        for c in reversed(coeff_values[:-1]):
            acc = acc * self
            acc = acc + TruncatedSeries.constant(c, self.max_orders)
        return acc

    def __repr__(self) -> str:
        return f"TruncatedSeries(max_orders={self.max_orders})"


def mixed_partial(series: TruncatedSeries, orders: Sequence[int]) -> SignedLogReal:
    """The mixed partial d^|orders| f / prod dt_j^orders[j] at the expansion point.

    Equals the Taylor coefficient at ``orders`` times ``prod orders[j]!``.
    """
    orders = tuple(int(o) for o in orders)
    if len(orders) != series.dims:
        raise ShapeMismatchError(f"expected {series.dims} orders, got {len(orders)}")
    if any(o < 0 for o in orders):
        raise ValueError(f"negative derivative order in {orders}")
    if any(o > m for o, m in zip(orders, series.max_orders)):
        raise SeriesSizeError(
            f"orders {orders} exceed the series truncation {series.max_orders}")
    log_fact = sum(math.lgamma(o + 1) for o in orders)
    return series.coeff(orders).scale_log(log_fact)


def _checked_shape(max_orders: tuple) -> tuple:
    if any(o < 0 for o in max_orders):
        raise ValueError(f"negative truncation order in {max_orders}")
    shape = tuple(o + 1 for o in max_orders)
    size = math.prod(shape)
    if size > MAX_TENSOR_ENTRIES:
        raise SeriesSizeError(
            f"coefficient tensor would need {size} entries "
            f"(limit {MAX_TENSOR_ENTRIES}); use a separable formulation")
    return shape


def _by_total_degree(shape: tuple) -> Iterable[tuple]:
    idxs = list(np.ndindex(*shape))
    idxs.sort(key=sum)
    return idxs


def _as_slr(value) -> SignedLogReal:
    if isinstance(value, SignedLogReal):
        return value
    return SignedLogReal.from_real(float(value))
