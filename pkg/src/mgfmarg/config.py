"""Declarative run configurations (TOML) for the CLI.

A marginal config names a model kind, a prior, and exactly one data source::

    [model]
    kind = "poisson-scaled"     # poisson-hier | poisson-scaled | poisson-single
                                # | gamma-hier | gamma-single | gamma-integer
    # optional, kind-dependent:
    # r = [[0.1, 0.0], ...]     or "identity" / "shared"
    # zeta = [...],  scale = 1.3,  alpha = 0.5 (scalar or list)

    [prior]
    family = "gamma"            # gamma | exponential | pareto | point
    shape = 1.27
    rate = 0.82

    [data]
    source = "builtin:pump"     # builtin:pump | inline | a CSV path
    # inline:           y = [0, 1, 2]
    # CSV:              y_column = "y"    zeta_column = "t" (optional)

A fit config drives the fixed-effect MMLE::

    [fit]
    alpha = 45
    xi = 34.42982
    seed = 4                    # synthetic cake-shaped data ...
    # data = "cake.csv"         # ... or a table with recipe, temperature,
                                #     replication, angle columns
    # start = [...], max_evals = 5000

No environment variables influence any numeric result.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .marginalize import (GammaProblem, MarginalResult, PoissonProblem,
                          gamma_hier, gamma_integer, gamma_single,
                          poisson_hier, poisson_scaled, poisson_single)
from .mgf import ExponentialPrior, GammaPrior, ParetoPrior, PointMass, PriorMgf
from .models import PUMP, load_table

__all__ = ["MarginalTask", "FitTask", "load_marginal_config", "load_fit_config"]

_POISSON_KINDS = ("poisson-hier", "poisson-scaled", "poisson-single")
_GAMMA_KINDS = ("gamma-hier", "gamma-single", "gamma-integer")


@dataclass(frozen=True)
class MarginalTask:
    kind: str
    prior: PriorMgf
    y: np.ndarray
    zeta: Optional[np.ndarray]
    r: Optional[np.ndarray]
    alpha: Optional[np.ndarray]
    scale: float

    def run(self) -> MarginalResult:
        m = len(self.y)
        if self.kind == "poisson-hier":
            return poisson_hier(PoissonProblem(priors=(self.prior,) * m, y=self.y))
        if self.kind == "poisson-scaled":
            r = self.r
            n = m if r is None else r.shape[1]
            return poisson_scaled(PoissonProblem(
                priors=(self.prior,) * n, y=self.y, r=r, zeta=self.zeta))
        if self.kind == "poisson-single":
            return poisson_single(self.prior, self.y, zeta=self.scale)
        if self.kind == "gamma-hier":
            return gamma_hier(GammaProblem(
                priors=(self.prior,) * m, alpha=self.alpha, y=self.y,
                r=self.r, zeta=self.zeta))
        if self.kind == "gamma-single":
            return gamma_single(self.prior, float(self.alpha[0]), self.y,
                                r=self.scale)
        if self.kind == "gamma-integer":
            r = self.r
            n = m if r is None else r.shape[1]
            return gamma_integer(GammaProblem(
                priors=(self.prior,) * n, alpha=self.alpha, y=self.y,
                r=r, zeta=self.zeta))
        raise ConfigError("model.kind", f"unknown kind {self.kind!r}")


@dataclass(frozen=True)
class FitTask:
    alpha: int
    xi: float
    seed: Optional[int]
    data_path: Optional[str]
    start: Optional[np.ndarray]
    max_evals: int


def _load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError("(file)", f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("(file)", f"not valid TOML: {exc}") from None


def _require(table: dict, field: str, context: str):
    if field not in table:
        raise ConfigError(f"{context}.{field}", "missing required entry")
    return table[field]


def _build_prior(table: dict) -> PriorMgf:
    family = _require(table, "family", "prior")
    try:
        if family == "gamma":
            return GammaPrior(float(_require(table, "shape", "prior")),
                              float(_require(table, "rate", "prior")))
        if family == "exponential":
            return ExponentialPrior(float(_require(table, "rate", "prior")))
        if family == "pareto":
            return ParetoPrior(float(_require(table, "tail", "prior")),
                               float(_require(table, "scale", "prior")))
        if family == "point":
            return PointMass(float(_require(table, "location", "prior")))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("prior", str(exc)) from None
    raise ConfigError("prior.family", f"unknown family {family!r}")


def _resolve_r(spec, m: int):
    if spec is None:
        return None
    if isinstance(spec, str):
        if spec == "identity":
            return None
        if spec == "shared":
            return np.ones((m, 1))
        raise ConfigError("model.r", f"unknown shorthand {spec!r}")
    try:
        r = np.asarray(spec, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("model.r", "must be a matrix of numbers") from None
    if r.ndim != 2 or r.shape[0] != m:
        raise ConfigError("model.r", f"needs {m} rows, got shape {r.shape}")
    return r


def load_marginal_config(path) -> MarginalTask:
    doc = _load_toml(path)
    model = _require(doc, "model", "(top level)")
    prior_tbl = _require(doc, "prior", "(top level)")
    data = _require(doc, "data", "(top level)")

    kind = _require(model, "kind", "model")
    if kind not in _POISSON_KINDS + _GAMMA_KINDS:
        raise ConfigError("model.kind", f"unknown kind {kind!r}")
    prior = _build_prior(prior_tbl)

    source = _require(data, "source", "data")
    inline_y = data.get("y")
    if source == "inline":
        if inline_y is None:
            raise ConfigError("data.y", "inline source needs a y list")
        y = np.asarray(inline_y, dtype=float)
        zeta = (np.asarray(data["zeta"], dtype=float)
                if "zeta" in data else None)
    elif source == "builtin:pump":
        if inline_y is not None:
            raise ConfigError("data.y", "builtin:pump already provides y")
        y = np.asarray(PUMP.y, dtype=float)
        zeta = np.asarray(PUMP.t)
    elif isinstance(source, str) and source.endswith(".csv"):
        if inline_y is not None:
            raise ConfigError("data.y", "CSV source conflicts with inline y")
        table = load_table(source)
        y_col = _require(data, "y_column", "data")
        if y_col not in table:
            raise ConfigError("data.y_column", f"column {y_col!r} not in {source}")
        y = table[y_col]
        zeta = None
        if "zeta_column" in data:
            z_col = data["zeta_column"]
            if z_col not in table:
                raise ConfigError("data.zeta_column",
                                  f"column {z_col!r} not in {source}")
            zeta = table[z_col]
    else:
        raise ConfigError("data.source",
                          f"expected inline, builtin:pump or a .csv path, got {source!r}")

    if "zeta" in model:
        zeta = np.asarray(model["zeta"], dtype=float)
    m = len(y)
    if zeta is not None and len(zeta) != m:
        raise ConfigError("data.zeta", f"needs length {m}, got {len(zeta)}")
    r = _resolve_r(model.get("r"), m)

    alpha = None
    if kind in _GAMMA_KINDS:
        alpha_spec = _require(model, "alpha", "model")
        alpha = np.atleast_1d(np.asarray(alpha_spec, dtype=float))
        if len(alpha) == 1 and m > 1:
            alpha = np.full(m, alpha[0])
        if len(alpha) != m:
            raise ConfigError("model.alpha", f"needs length {m}, got {len(alpha)}")
        if kind == "gamma-single" and len(set(alpha.tolist())) != 1:
            raise ConfigError("model.alpha", "gamma-single uses one shared shape")
    if kind in ("poisson-hier", "poisson-scaled"):
        if not np.all(y == np.floor(y)) or np.any(y < 0):
            raise ConfigError("data.y", "Poisson counts must be nonnegative integers")
        y = y.astype(np.int64)
    if kind == "poisson-single":
        y = y.astype(np.int64)

    scale = float(model.get("scale", 1.0))
    if not scale > 0 or not math.isfinite(scale):
        raise ConfigError("model.scale", f"must be a positive number, got {scale}")
    return MarginalTask(kind=kind, prior=prior, y=y, zeta=zeta, r=r,
                        alpha=alpha, scale=scale)


def load_fit_config(path) -> FitTask:
    doc = _load_toml(path)
    fit = _require(doc, "fit", "(top level)")
    alpha = _require(fit, "alpha", "fit")
    if alpha != int(alpha) or alpha < 1:
        raise ConfigError("fit.alpha", f"must be a positive integer, got {alpha}")
    xi = float(_require(fit, "xi", "fit"))
    if not xi > 0:
        raise ConfigError("fit.xi", f"must be positive, got {xi}")
    data_path = fit.get("data")
    seed = fit.get("seed")
    if data_path is None and seed is None:
        raise ConfigError("fit.data", "need either a data CSV or a seed for "
                          "synthetic data")
    start = None
    if "start" in fit:
        start = np.asarray(fit["start"], dtype=float)
    max_evals = int(fit.get("max_evals", 5000))
    if max_evals < 1:
        raise ConfigError("fit.max_evals", "must be positive")
    return FitTask(alpha=int(alpha), xi=xi, seed=seed, data_path=data_path,
                   start=start, max_evals=max_evals)
