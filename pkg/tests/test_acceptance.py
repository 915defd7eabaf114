"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run ``pytest -s tests/test_acceptance.py`` to see the per-criterion lines.
"""

import math
import time

import numpy as np
import pytest

from mgfmarg.examples import (DEFAULT_CAKE_SEED, OVERLAP_MATRIX,
                              OVERLAP_REFERENCE)
from mgfmarg.fitting import fit_cake_mmle
from mgfmarg.marginalize import (GammaProblem, PoissonProblem, gamma_hier,
                                 gamma_integer, gamma_single, poisson_hier,
                                 poisson_scaled, poisson_single)
from mgfmarg.mgf import ExponentialPrior, GammaPrior, ParetoPrior
from mgfmarg.models import (PUMP, cake_design, cake_problem,
                            make_cake_dataset, pump_problem)
from mgfmarg.oracles import (chib_poisson_gamma, compound_gamma,
                             compound_gamma_groups, mc_overlap_check,
                             negbin_mixture)
from mgfmarg.quadrature import log_quad_semiinf
from mgfmarg.signedlog import ONE
from mgfmarg.verify import properties as property_suite
from mgfmarg.verify import closed_forms, quadrature as quadrature_suite


def _line(num: int, ok: bool, detail: str) -> bool:
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def test_criterion_1_single_zero_count():
    res = poisson_hier(PoissonProblem(priors=(GammaPrior(4, 5),), y=[0]))
    oracle = negbin_mixture(0, 4.0, 5.0)
    diff = abs(res.log_value - oracle.log_magnitude)
    value_ok = abs(math.exp(res.log_value) - 0.4822531) <= 5e-8
    best = math.inf
    for _ in range(20):
        t0 = time.perf_counter()
        poisson_hier(PoissonProblem(priors=(GammaPrior(4, 5),), y=[0]))
        best = min(best, time.perf_counter() - t0)
    ok = _line(1, diff <= 1e-9 and value_ok and best < 1e-3,
               f"0.4822531 both paths, |log diff| {diff:.1e} <= 1e-9, "
               f"runtime {best * 1e6:.0f} us < 1 ms")
    assert ok


def test_criterion_2_hierarchical_counts():
    priors = tuple(GammaPrior(6, 5) for _ in range(4))
    res = poisson_hier(PoissonProblem(priors=priors, y=[0, 1, 2, 3]))
    oracle = ONE
    for k in (0, 1, 2, 3):
        oracle = oracle * negbin_mixture(k, 6.0, 5.0)
    diff = abs(res.log_value - oracle.log_magnitude)
    value_ok = abs(math.exp(res.log_value) - 0.001902397) <= 5e-10
    ok = _line(2, diff <= 1e-9 and value_ok,
               f"0.001902397 both paths, |log diff| {diff:.1e} <= 1e-9")
    assert ok


def test_criterion_3_single_rate_chib():
    res = poisson_single(GammaPrior(4, 6), [0, 0, 1, 2])
    logs = [chib_poisson_gamma([0, 0, 1, 2], 4.0, 6.0, lam).log_magnitude
            for lam in (0.5, 1.0, 2.0, 5.0)]
    diff = abs(res.log_value - logs[1])
    spread = max(logs) - min(logs)
    value_ok = abs(math.exp(res.log_value) - 0.007776) <= 5e-7
    ok = _line(3, diff <= 1e-9 and spread <= 1e-12 and value_ok,
               f"0.007776 via derivative path and Chib, |log diff| {diff:.1e}, "
               f"Chib spread {spread:.1e} <= 1e-12")
    assert ok


def test_criterion_4_dense_series_and_monte_carlo():
    priors = tuple(GammaPrior(4.5, 2.0) for _ in range(3))
    y = [0, 1, 0, 2, 3]
    res = poisson_scaled(PoissonProblem(priors=priors, y=y, r=OVERLAP_MATRIX))
    rel = abs(math.exp(res.log_value) / OVERLAP_REFERENCE - 1.0)
    rounds = round(math.exp(res.log_value), 9) == 0.005745693
    t0 = time.perf_counter()
    mc = mc_overlap_check(OVERLAP_MATRIX, GammaPrior(4.5, 2.0), y,
                          10 ** 6, 42, 0.005745693)
    mc_seconds = time.perf_counter() - t0
    interval_ok = (mc.ci_low, mc.ci_high) == (5598, 5894)
    ok = _line(4, (res.path.value == "dense-series" and rel <= 1e-8 and rounds
                   and mc.passed and interval_ok and mc_seconds < 30.0),
               f"dense series 0.005745693 (rel {rel:.1e} <= 1e-8); MC seed 42: "
               f"{mc.hits} hits in [{mc.ci_low}, {mc.ci_high}] "
               f"in {mc_seconds:.1f}s < 30s")
    assert ok


def test_criterion_5_pump_marginal():
    res = poisson_scaled(pump_problem(GammaPrior(1.27, 0.82)))
    oracle = ONE
    for t_i, y_i in zip(PUMP.t, PUMP.y):
        oracle = oracle * negbin_mixture(int(y_i), 1.27, 0.82, t_i)
    diff = abs(res.log_value - oracle.log_magnitude)
    value_ok = abs(math.exp(res.log_value) / 2.766569e-16 - 1.0) <= 5e-7
    ok = _line(5, diff <= 1e-12 and value_ok,
               f"2.766569e-16 both routes, log-scale |diff| {diff:.1e} <= 1e-12")
    assert ok


def test_criterion_6_pareto_pump():
    alpha, k = 80.0, 0.01
    log_pref = sum(y_i * math.log(t_i) - math.lgamma(y_i + 1)
                   for t_i, y_i in zip(PUMP.t, PUMP.y))
    ref = math.log(2.799194e48)
    pref_rel = abs(log_pref - ref) / abs(ref)

    res = poisson_scaled(pump_problem(ParetoPrior(alpha, k), shared=True))
    total_y, total_t = float(sum(PUMP.y)), float(sum(PUMP.t))

    def log_integrand(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (total_y - alpha - 1.0) * np.log(lam) - lam * total_t
        return np.where(lam >= k, out, -np.inf)

    quad = log_quad_semiinf(log_integrand, k, tol=1e-12)
    log_direct = log_pref + math.log(alpha) + alpha * math.log(k) + quad.log_value
    marg_rel = abs(res.log_value - log_direct)
    ok = _line(6, pref_rel <= 1e-6 and marg_rel <= 1e-6,
               f"log prefactor within {pref_rel:.1e} of log(2.799194e48); "
               f"marginal at (80, 0.01) within {marg_rel:.1e} of the "
               "direct quadrature oracle")
    assert ok


def test_criterion_7_fractional_examples():
    res7 = gamma_single(ExponentialPrior(1.0), 1.0, [3.4])
    d7 = abs(res7.log_value - compound_gamma([3.4], 1.0, 1.0, 1.0).log_magnitude)
    v7 = abs(math.exp(res7.log_value) - 1 / 4.4 ** 2) <= 1e-12

    prob8 = GammaProblem(priors=(ExponentialPrior(0.9),) * 2,
                         alpha=[1.5, 2.0], y=[0.4, 2.2])
    res8 = gamma_hier(prob8)
    o8 = (compound_gamma([0.4], 1.0, 0.9, 1.5)
          * compound_gamma([2.2], 1.0, 0.9, 2.0))
    d8 = abs(res8.log_value - o8.log_magnitude)
    v8 = abs(math.exp(res8.log_value) - 0.05890003) <= 5e-9

    res9 = gamma_single(ExponentialPrior(1.1), 0.5, [2.7, 3.3, 3.6])
    o9 = compound_gamma([2.7, 3.3, 3.6], 1.0, 1.1, 0.5)
    d9 = abs(res9.log_value - o9.log_magnitude)
    v9 = abs(math.exp(res9.log_value) - 0.0001238097) <= 5e-11

    ok = _line(7, max(d7, d8, d9) <= 1e-9 and v7 and v8 and v9,
               f"1/4.4^2, 0.05890003, 0.0001238097 via fractional paths; "
               f"|log diffs| ({d7:.1e}, {d8:.1e}, {d9:.1e}) <= 1e-9")
    assert ok


def test_criterion_8_cake_identity_and_fit():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        a = rng.normal(scale=0.4, size=8)
        a[0] = rng.normal(3.0, 0.5)
        xi = float(rng.uniform(2.0, 60.0))
        alpha = int(rng.integers(2, 51))
        data = make_cake_dataset(seed=int(rng.integers(10 ** 6)), a_true=a,
                                 xi=xi, alpha=alpha)
        res = gamma_integer(cake_problem(data, a))
        zeta = alpha * np.exp(-(cake_design(data.recipe, data.temperature) @ a))
        oracle = compound_gamma_groups(data.angle, data.replication,
                                       xi + 1.0, xi, float(alpha), zeta=zeta)
        worst = max(worst, abs(res.log_value - oracle.log_magnitude))

    data = make_cake_dataset(seed=DEFAULT_CAKE_SEED)
    fit = fit_cake_mmle(data)
    err = float(np.max(np.abs(fit.coefficients - data.a_true)))
    ok = _line(8, worst <= 1e-10 and fit.converged and err <= 0.05,
               f"block-structure identity |log diff| <= {worst:.1e} over 20 "
               f"draws (tol 1e-10); MMLE recovery max error {err:.3f} <= 0.05")
    assert ok


def test_criterion_9_property_suites_and_runtime():
    t0 = time.perf_counter()
    results = property_suite(seed=0) + closed_forms() + quadrature_suite()
    elapsed = time.perf_counter() - t0
    by_name = {r.name: r for r in results}
    needed = ("gamma-recursion", "mellin-generic-agreement",
              "dual-form-agreement", "mixed-partial-permutation",
              "poisson-normalization", "derivative-finite-difference",
              "frac-integer-identity")
    all_ok = all(by_name[n].passed for n in needed)
    every = all(r.passed for r in results)
    ok = _line(9, all_ok and every and elapsed < 60.0,
               f"{sum(r.passed for r in results)}/{len(results)} property and "
               f"verification checks pass in {elapsed:.1f}s < 60s")
    assert ok
