"""Translate regression-style model specifications into marginalization problems.

Only rate structures that are *linear* in the random effects fit the mgf
machinery, so the builders here cover exactly the link combinations with a
linear reduction: log-link Poisson HGLMs (theta multiplies e^(Xa+b)),
identity-link Poisson GLMMs (offsets absorbed as point-mass priors),
-log-random-link gamma HGLMs, and inverse-link gamma GLMMs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import (NegativeRateRiskError, NonIntegerShapeWithCouplingError,
                     TableFormatError)
from .marginalize import GammaProblem, PoissonProblem
from .mgf import GammaPrior, PointMass, PriorMgf

__all__ = [
    "Link",
    "RegressionSpec",
    "PumpData",
    "PUMP",
    "pump_problem",
    "build_poisson_log_hglm",
    "build_poisson_identity_glmm",
    "build_gamma_hglm",
    "load_table",
    "CakeData",
    "make_cake_dataset",
    "cake_design",
    "cake_blocks",
    "cake_problem",
]


class Link(str, Enum):
    IDENTITY = "identity"
    LOG = "log"
    INVERSE = "inverse"


@dataclass(frozen=True)
class RegressionSpec:
    """A GLMM/HGLM: y | theta ~ family(g^-1(X a + b + structure(theta))).

    ``r_blocks`` is the random-effect membership/design matrix (one column
    per latent variable).  ``family`` is "poisson" or "gamma"; gamma needs a
    known ``shape``.  ``random_prior`` is the common prior of the iid
    random effects.
    """

    y: np.ndarray
    link: Link
    family: str
    random_prior: PriorMgf
    X: Optional[np.ndarray] = None
    a: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None
    r_blocks: Optional[np.ndarray] = None
    shape: Optional[float] = None

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        object.__setattr__(self, "y", y)
        m = len(y)
        if self.family not in ("poisson", "gamma"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "gamma" and (self.shape is None or not self.shape > 0):
            raise ValueError("gamma family needs a positive known shape")
        if self.X is not None:
            X = np.atleast_2d(np.asarray(self.X, dtype=float))
            if X.shape[0] != m:
                raise ValueError(f"X has {X.shape[0]} rows for {m} observations")
            object.__setattr__(self, "X", X)
            if self.a is None:
                raise ValueError("a design matrix X needs a coefficient vector a")
            a = np.atleast_1d(np.asarray(self.a, dtype=float))
            if len(a) != X.shape[1]:
                raise ValueError(f"a has length {len(a)} for {X.shape[1]} columns of X")
            object.__setattr__(self, "a", a)
        if self.b is not None:
            b = np.atleast_1d(np.asarray(self.b, dtype=float))
            if len(b) != m:
                raise ValueError(f"offset vector b has length {len(b)} for {m} observations")
            object.__setattr__(self, "b", b)
        if self.r_blocks is not None:
            r = np.atleast_2d(np.asarray(self.r_blocks, dtype=float))
            if r.shape[0] != m:
                raise ValueError(f"r_blocks has {r.shape[0]} rows for {m} observations")
            object.__setattr__(self, "r_blocks", r)

    @property
    def n_obs(self) -> int:
        return len(self.y)

    def linear_predictor(self) -> np.ndarray:
        """X a + b (zeros where absent)."""
        eta = np.zeros(self.n_obs)
        if self.X is not None:
            eta = eta + self.X @ self.a
        if self.b is not None:
            eta = eta + self.b
        return eta

    def blocks_or_identity(self) -> np.ndarray:
        return np.eye(self.n_obs) if self.r_blocks is None else self.r_blocks


# ----------------------------------------------------------------------
# builders

def build_poisson_log_hglm(spec: RegressionSpec) -> PoissonProblem:
    """Log-link Poisson HGLM: rates = theta * exp(X a + b).

    The random effect multiplies the exponentiated linear predictor, so the
    scaling vector is zeta = exp(X a + b) and the map r is the block
    membership.
    """
    if spec.link is not Link.LOG or spec.family != "poisson":
        raise ValueError("build_poisson_log_hglm needs link=log, family=poisson")
    zeta = np.exp(spec.linear_predictor())
    r = spec.blocks_or_identity()
    n = r.shape[1]
    return PoissonProblem(priors=(spec.random_prior,) * n,
                          y=spec.y.astype(np.int64), r=r, zeta=zeta)


def build_poisson_identity_glmm(spec: RegressionSpec) -> PoissonProblem:
    """Identity-link Poisson GLMM: rates = X a + b + Z theta.

    Deterministic offsets enter as extra point-mass "priors" so the rate
    stays a purely linear map of (theta, offsets); positive-rate risks are
    rejected rather than silently marginalized.
    """
    if spec.link is not Link.IDENTITY or spec.family != "poisson":
        raise ValueError("build_poisson_identity_glmm needs link=identity, family=poisson")
    offsets = spec.linear_predictor()
    Z = spec.blocks_or_identity()
    m, n = Z.shape
    coverage = np.any(Z != 0, axis=1)
    for j in range(m):
        if offsets[j] < 0:
            raise NegativeRateRiskError(
                f"observation {j}: negative offset {offsets[j]:g} can push the "
                "rate below zero")
        if offsets[j] == 0 and not coverage[j]:
            raise NegativeRateRiskError(
                f"observation {j}: no random-effect coverage and no positive offset")
    aug_cols = [j for j in range(m) if offsets[j] > 0]
    r = Z
    priors = list((spec.random_prior,) * n)
    if aug_cols:
        extra = np.zeros((m, len(aug_cols)))
        for c, j in enumerate(aug_cols):
            extra[j, c] = 1.0
        r = np.hstack([Z, extra])
        priors.extend(PointMass(float(offsets[j])) for j in aug_cols)
    return PoissonProblem(priors=tuple(priors), y=spec.y.astype(np.int64), r=r)


def build_gamma_hglm(spec: RegressionSpec) -> GammaProblem:
    """Gamma HGLM/GLMM with a rate structure linear in the random effects.

    * link LOG (with -log link on the random effects): rate_j =
      alpha * theta_i * exp(-(X a + b)_j), i.e. zeta = alpha * exp(-X a - b).
    * link INVERSE: rate = alpha (X a + b) + alpha Z theta, handled like the
      identity Poisson case via point-mass augmentation.

    A genuine coupling (non-diagonal blocks) only commutes with integer
    differentiation orders, so non-integer shapes are refused there.

    Note on the Gamma(xi+1, xi) convention: that prior has mean (xi+1)/xi,
    i.e. E(theta) = 1 holds only as xi grows; the reciprocal 1/theta is the
    inverse-gamma variable with unit mean.  The builder takes whatever
    template it is given and does not enforce either normalisation.
    """
    if spec.family != "gamma":
        raise ValueError("build_gamma_hglm needs family=gamma")
    alpha = float(spec.shape)
    r = spec.blocks_or_identity()
    m, n = r.shape
    diagonal = m == n and np.all(r == np.diag(np.diag(r)))
    if not diagonal and alpha != math.floor(alpha):
        raise NonIntegerShapeWithCouplingError(
            f"shape {alpha} is not an integer: coupled random-effect blocks "
            "need integer shapes")

    if spec.link is Link.LOG:
        zeta = alpha * np.exp(-spec.linear_predictor())
        return GammaProblem(priors=(spec.random_prior,) * n,
                            alpha=np.full(m, alpha), y=spec.y, r=r, zeta=zeta)
    if spec.link is Link.INVERSE:
        offsets = alpha * spec.linear_predictor()
        if np.any(offsets < 0):
            raise NegativeRateRiskError("negative inverse-link offsets risk "
                                        "non-positive gamma rates")
        priors = list((spec.random_prior,) * n)
        r_full = alpha * r
        aug_cols = [j for j in range(m) if offsets[j] > 0]
        if aug_cols:
            extra = np.zeros((m, len(aug_cols)))
            for c, j in enumerate(aug_cols):
                extra[j, c] = 1.0
            r_full = np.hstack([r_full, extra])
            priors.extend(PointMass(float(offsets[j])) for j in aug_cols)
        coverage = np.any(r_full != 0, axis=1)
        if not np.all(coverage):
            raise NegativeRateRiskError("some observations have no positive rate source")
        return GammaProblem(priors=tuple(priors), alpha=np.full(m, alpha),
                            y=spec.y, r=r_full)
    raise ValueError(f"no gamma marginalisation route for link {spec.link.value}")


# ----------------------------------------------------------------------
# data

@dataclass(frozen=True)
class PumpData:
    """The ten-pump failure record: operating times (thousands of hours) and counts."""

    t: tuple = (94.32, 15.72, 62.88, 125.76, 5.24, 31.44, 1.048, 1.048, 2.096, 10.48)
    y: tuple = (5, 1, 5, 14, 3, 19, 1, 1, 4, 22)

    @property
    def total_time(self) -> float:
        return float(sum(self.t))

    @property
    def total_failures(self) -> int:
        return int(sum(self.y))


PUMP = PumpData()


def pump_problem(prior: PriorMgf, shared: bool = False) -> PoissonProblem:
    """The pump model as a PoissonProblem.

    ``shared=False``: one rate per pump, iid priors (hierarchical model).
    ``shared=True``: a single rate parameter behind all pumps.
    """
    t = np.array(PUMP.t)
    y = np.array(PUMP.y, dtype=np.int64)
    if shared:
        return PoissonProblem(priors=(prior,), y=y, r=np.ones((len(y), 1)), zeta=t)
    return PoissonProblem(priors=(prior,) * len(y), y=y, zeta=t)


def load_table(path, fmt: str = "csv") -> dict:
    """Parse a numeric table with a header row into column arrays."""
    if fmt != "csv":
        raise TableFormatError(f"unsupported table format {fmt!r}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TableFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if any(not h for h in header):
            raise TableFormatError(f"{path}: blank column name in header")
        columns = {h: [] for h in header}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise TableFormatError(
                    f"{path}: line {lineno}: {len(row)} fields, expected {len(header)}")
            for h, cell in zip(header, row):
                try:
                    columns[h].append(float(cell))
                except ValueError:
                    raise TableFormatError(
                        f"{path}: line {lineno}: non-numeric value {cell!r} "
                        f"in column {h!r}") from None
    if not next(iter(columns.values()), []):
        raise TableFormatError(f"{path}: no data rows")
    return {h: np.array(v) for h, v in columns.items()}


# ----------------------------------------------------------------------
# synthetic cake-shaped data

_CAKE_TEMPS = (175, 185, 195, 205, 215, 225)


@dataclass(frozen=True)
class CakeData:
    """A cake-baking-shaped dataset: recipes x temperatures x replications."""

    recipe: np.ndarray
    temperature: np.ndarray
    replication: np.ndarray
    angle: np.ndarray
    a_true: np.ndarray
    xi: float
    alpha: int


def cake_design(recipe: np.ndarray, temperature: np.ndarray) -> np.ndarray:
    """Full-rank dummy design: intercept, recipe 2..3, temperature 185..225.

    The first recipe and the lowest temperature are the reference levels
    (the all-dummies coding is rank-deficient and unidentifiable).
    """
    m = len(recipe)
    cols = [np.ones(m)]
    for rec in (2, 3):
        cols.append((recipe == rec).astype(float))
    for temp in _CAKE_TEMPS[1:]:
        cols.append((temperature == temp).astype(float))
    return np.column_stack(cols)


def cake_blocks(replication: np.ndarray) -> np.ndarray:
    """0/1 membership matrix with one column per replication block."""
    labels = np.unique(replication)
    return (replication[:, None] == labels[None, :]).astype(float)


def default_cake_coefficients() -> np.ndarray:
    return np.array([3.4, 0.06, -0.04, 0.05, 0.09, 0.13, 0.16, 0.20])


def make_cake_dataset(seed: int, a_true=None, xi: float = 34.42982,
                      alpha: int = 45, n_reps: int = 15) -> CakeData:
    """Simulate breaking angles from the log-link gamma HGLM.

    Replications carry iid Gamma(xi+1, xi) random effects; each of the
    3 * 6 * n_reps cakes draws Gamma(alpha, rate = alpha * theta_rep *
    exp(-x' a)).  The layout (3 recipes x 6 temperatures x n_reps
    replications) matches the classic experiment; the values are synthetic.
    """
    if a_true is None:
        a_true = default_cake_coefficients()
    a_true = np.asarray(a_true, dtype=float)
    recipe, temperature, replication = [], [], []
    for rep in range(1, n_reps + 1):
        for rec in (1, 2, 3):
            for temp in _CAKE_TEMPS:
                recipe.append(rec)
                temperature.append(temp)
                replication.append(rep)
    recipe = np.array(recipe)
    temperature = np.array(temperature)
    replication = np.array(replication)
    X = cake_design(recipe, temperature)
    if X.shape[1] != len(a_true):
        raise ValueError(f"a_true needs length {X.shape[1]}, got {len(a_true)}")

    rng = np.random.Generator(np.random.Philox(key=seed))
    theta = rng.gamma(xi + 1.0, 1.0 / xi, n_reps)
    rate = alpha * theta[replication - 1] * np.exp(-(X @ a_true))
    angle = rng.gamma(float(alpha), 1.0 / rate)
    return CakeData(recipe=recipe, temperature=temperature,
                    replication=replication, angle=angle,
                    a_true=a_true, xi=float(xi), alpha=int(alpha))


def cake_problem(data: CakeData, a: np.ndarray, xi: float = None,
                 alpha: int = None) -> GammaProblem:
    """The cake marginalisation problem at fixed-effect values ``a``."""
    xi = data.xi if xi is None else xi
    alpha = data.alpha if alpha is None else alpha
    X = cake_design(data.recipe, data.temperature)
    spec = RegressionSpec(y=data.angle, link=Link.LOG, family="gamma",
                          shape=float(alpha), random_prior=GammaPrior(xi + 1.0, xi),
                          X=X, a=np.asarray(a, dtype=float),
                          r_blocks=cake_blocks(data.replication))
    return build_gamma_hglm(spec)
