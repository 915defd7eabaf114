"""Signed log-space reals.

Probabilities and mgf derivative values in this package routinely live at
scales like 1e-16 (pump-failure marginal) down to 1e-100 and below, while
intermediate series coefficients can be astronomically large.  All such
quantities are therefore carried as a natural log of the magnitude plus an
explicit sign, and converted to the linear scale only at output boundaries.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

__all__ = ["SignedLogReal", "ZERO", "ONE", "signed_logsumexp"]


class SignedLogReal:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign`` is one of -1, 0, +1 and is 0 exactly when the represented value
    is zero (the magnitude is then pinned to ``-inf`` and carries no
    information).
    """

    __slots__ = ("log_magnitude", "sign")

    def __init__(self, log_magnitude: float, sign: int):
        if sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {sign!r}")
        if math.isnan(log_magnitude):
            raise ValueError("log magnitude is NaN")
        if sign == 0 or log_magnitude == -math.inf:
            sign = 0
            log_magnitude = -math.inf
        self.log_magnitude = float(log_magnitude)
        self.sign = sign

    @classmethod
    def from_real(cls, x: float) -> "SignedLogReal":
        if x == 0:
            return ZERO
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    @classmethod
    def from_log(cls, log_magnitude: float, sign: int = 1) -> "SignedLogReal":
        return cls(log_magnitude, sign)

    def to_real(self) -> float:
        """Linear-scale value; overflows to +-inf outside float range."""
        if self.sign == 0:
            return 0.0
        try:
            mag = math.exp(self.log_magnitude)
        except OverflowError:
            mag = math.inf
        return self.sign * mag

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other: "SignedLogReal") -> "SignedLogReal":
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return SignedLogReal(self.log_magnitude + other.log_magnitude,
                             self.sign * other.sign)

    def __truediv__(self, other: "SignedLogReal") -> "SignedLogReal":
        if other.sign == 0:
            raise ZeroDivisionError("division by signed-log zero")
        if self.sign == 0:
            return ZERO
        return SignedLogReal(self.log_magnitude - other.log_magnitude,
                             self.sign * other.sign)

    def __neg__(self) -> "SignedLogReal":
        if self.sign == 0:
            return ZERO
        return SignedLogReal(self.log_magnitude, -self.sign)

    def __abs__(self) -> "SignedLogReal":
        if self.sign == 0:
            return ZERO
        return SignedLogReal(self.log_magnitude, 1)

    def __add__(self, other: "SignedLogReal") -> "SignedLogReal":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        la, lb = self.log_magnitude, other.log_magnitude
        if self.sign == other.sign:
            return SignedLogReal(np.logaddexp(la, lb), self.sign)
        # Opposite signs: log-diff-exp anchored at the larger magnitude.
        if la == lb:
            return ZERO
        if la > lb:
            big_sign, hi, lo = self.sign, la, lb
        else:
            big_sign, hi, lo = other.sign, lb, la
        return SignedLogReal(hi + math.log1p(-math.exp(lo - hi)), big_sign)

    def __sub__(self, other: "SignedLogReal") -> "SignedLogReal":
        return self + (-other)

    def scale_log(self, log_factor: float) -> "SignedLogReal":
        """Multiply by a positive factor given as its log."""
        if self.sign == 0:
            return ZERO
        return SignedLogReal(self.log_magnitude + log_factor, self.sign)

    def pow_int(self, k: int) -> "SignedLogReal":
        if k < 0 and self.sign == 0:
            raise ZeroDivisionError("zero to a negative power")
        if k == 0:
            return ONE
        if self.sign == 0:
            return ZERO
        sign = 1 if (self.sign == 1 or k % 2 == 0) else -1
        return SignedLogReal(k * self.log_magnitude, sign)

    def pow_real(self, p: float) -> "SignedLogReal":
        if self.sign <= 0:
            raise ValueError("real powers require a strictly positive base")
        return SignedLogReal(p * self.log_magnitude, 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignedLogReal):
            return NotImplemented
        return self.sign == other.sign and (
            self.sign == 0 or self.log_magnitude == other.log_magnitude)

    def __hash__(self) -> int:
        return hash((self.sign, self.log_magnitude if self.sign else 0.0))

    def __repr__(self) -> str:
        return f"SignedLogReal(log={self.log_magnitude:.6g}, sign={self.sign:+d})"


ZERO = SignedLogReal(-math.inf, 0)
ONE = SignedLogReal(0.0, 1)


def signed_logsumexp(logs: np.ndarray, signs: np.ndarray) -> SignedLogReal:
    """Sum of many signed log-space terms.

    Positive and negative terms are each accumulated with log-sum-exp, then
    combined with one sign-tracked log-diff-exp, so the accumulation order
    cannot produce spurious cancellation beyond the final subtraction.
    """
    logs = np.asarray(logs, dtype=float)
    signs = np.asarray(signs)
    pos = logs[signs > 0]
    neg = logs[signs < 0]
    total = ZERO
    if pos.size:
        total = total + SignedLogReal(_logsumexp(pos), 1)
    if neg.size:
        total = total + SignedLogReal(_logsumexp(neg), -1)
    return total


def _logsumexp(logs: np.ndarray) -> float:
    hi = np.max(logs)
    if hi == -math.inf:
        return -math.inf
    return float(hi + np.log(np.sum(np.exp(logs - hi))))


def slr_sum(terms: Iterable[SignedLogReal]) -> SignedLogReal:
    """Sum an iterable of SignedLogReal via two-bucket log-sum-exp."""
    terms = list(terms)
    if not terms:
        return ZERO
    logs = np.array([t.log_magnitude for t in terms])
    signs = np.array([t.sign for t in terms])
    return signed_logsumexp(logs, signs)
