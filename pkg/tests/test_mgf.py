import math

import numpy as np
import pytest

from mgfmarg.errors import (DivergenceError, DomainError,
                            UnsupportedFractionalError)
from mgfmarg.mgf import (ExponentialPrior, FracOrder, GammaPrior, ParetoPrior,
                         PointMass, deriv_frac_mellin,
                         mellin_fractional_integral)

ALL_FAMILIES = (GammaPrior(2.3, 3.1), ExponentialPrior(1.4),
                ParetoPrior(9.0, 0.8), PointMass(1.9))


class TestFracOrder:
    def test_integer_orders(self):
        for a in (0, 1, 2, 7):
            o = FracOrder.from_total(float(a))
            assert o.is_integer and o.integer_part == a and o.gamma_frac == 0.0

    def test_fractional_split(self):
        o = FracOrder.from_total(2.5)
        assert o.integer_part == 3 and o.gamma_frac == pytest.approx(0.5)
        o = FracOrder.from_total(0.3)
        assert o.integer_part == 1 and o.gamma_frac == pytest.approx(0.7)

    def test_invariant_total(self):
        for a in (0.7, 1.5, 3.25, 10.9):
            o = FracOrder.from_total(a)
            assert o.integer_part - o.gamma_frac == pytest.approx(a)

    def test_snaps_float_noise(self):
        o = FracOrder.from_total(3 * 0.5 + 1.5)  # 3.0000000000000004-style inputs
        assert o.is_integer and o.integer_part == 3

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            FracOrder.from_total(-0.5)


class TestEval:
    def test_all_families_at_zero(self):
        for fam in ALL_FAMILIES:
            assert fam.eval(0.0).log_magnitude == pytest.approx(0.0, abs=1e-12)

    def test_gamma_reference_value(self):
        assert GammaPrior(4, 5).eval(-1.0).to_real() == pytest.approx(
            0.4822531, abs=5e-8)

    def test_domain_boundary_is_error(self):
        with pytest.raises(DomainError):
            GammaPrior(2, 3).eval(3.0)   # exactly at the radius
        with pytest.raises(DomainError):
            ExponentialPrior(1.0).eval(1.5)
        with pytest.raises(DomainError):
            ParetoPrior(2, 1).eval(0.5)
        PointMass(2.0).eval(100.0)  # defined everywhere

    def test_monotone_domain_error(self):
        prior = GammaPrior(2, 3)
        prior.eval(2.999999)
        for t in (3.0, 3.5, 10.0):
            with pytest.raises(DomainError):
                prior.eval(t)


class TestIntegerDerivatives:
    def test_order_zero_is_eval(self):
        for fam in ALL_FAMILIES:
            assert fam.deriv_int(0, -0.7) == fam.eval(-0.7)

    def test_gamma_example(self):
        # third derivative of the Gamma(4,6) mgf at -4
        want = (6 * 5 * 4) / 10 ** 3 * 6 ** 4 / 10 ** 4
        assert GammaPrior(4, 6).deriv_int(3, -4.0).to_real() == pytest.approx(
            want, rel=1e-14)

    def test_exponential_example(self):
        want = 2 * 0.9 / 3.1 ** 3
        assert ExponentialPrior(0.9).deriv_int(2, -2.2).to_real() == pytest.approx(
            want, rel=1e-14)

    def test_gamma_recursion_exact(self):
        prior = GammaPrior(1.8, 2.6)
        t = -1.3
        for k in range(30):
            lhs = prior.deriv_int(k + 1, t).log_magnitude
            rhs = (prior.deriv_int(k, t).log_magnitude
                   + math.log(1.8 + k) - math.log(2.6 - t))
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_finite_difference_all_families(self):
        for fam in ALL_FAMILIES:
            t = -1.7
            h = 1e-5 * abs(t)
            for k in range(1, 6):
                fd = (math.exp(fam.deriv_int(k - 1, t + h).log_magnitude)
                      - math.exp(fam.deriv_int(k - 1, t - h).log_magnitude)) / (2 * h)
                ref = fam.deriv_int(k, t).to_real()
                assert fd == pytest.approx(ref, rel=1e-5)

    def test_positivity(self):
        rng = np.random.default_rng(3)
        for fam in ALL_FAMILIES:
            for _ in range(5):
                t = -float(rng.uniform(0.05, 4.0))
                k = int(rng.integers(0, 6))
                v = fam.deriv_int(k, t)
                if isinstance(fam, PointMass) and fam.location == 0 and k > 0:
                    continue
                assert v.sign == 1

    def test_pointmass(self):
        pm = PointMass(2.5)
        assert pm.deriv_int(3, -1.0).to_real() == pytest.approx(
            2.5 ** 3 * math.exp(-2.5), rel=1e-14)
        assert PointMass(0.0).deriv_int(2, -1.0).sign == 0

    def test_pareto_at_zero(self):
        p = ParetoPrior(5.0, 2.0)
        # E[theta] = tail * scale / (tail - 1)
        assert p.deriv_int(1, 0.0).to_real() == pytest.approx(5 * 2 / 4, rel=1e-12)
        with pytest.raises(DivergenceError):
            p.deriv_int(5, 0.0)

    def test_pareto_matches_moment_formula(self):
        # E[theta^m e^{t theta}] via the exponential-integral form
        p = ParetoPrior(80.0, 0.01)
        v = p.deriv_int(75, -350.032)
        assert v.sign == 1 and math.isfinite(v.log_magnitude)


class TestFractionalDerivatives:
    def test_integer_order_same_code_path(self):
        for fam in ALL_FAMILIES:
            for k in range(5):
                assert fam.deriv_frac(float(k), -0.9) == fam.deriv_int(k, -0.9)

    def test_exponential_three_halves_form(self):
        # 1.5th derivative: (1/Gamma(.5)) * 0.5 * 1.5 * lam * pi * (lam-t)^-2.5
        lam, t = 0.9, -0.4
        want = 0.5 * 1.5 * lam * math.pi * (lam - t) ** -2.5 / math.gamma(0.5)
        got = ExponentialPrior(lam).deriv_frac(1.5, t).to_real()
        assert got == pytest.approx(want, rel=1e-13)

    def test_gamma_closed_form(self):
        prior = GammaPrior(2.5, 3.0)
        alpha, t = 1.7, -0.8
        want = math.exp(math.lgamma(2.5 + alpha) - math.lgamma(2.5)
                        + 2.5 * math.log(3.0) - (2.5 + alpha) * math.log(3.0 - t))
        assert prior.deriv_frac(alpha, t).to_real() == pytest.approx(want, rel=1e-13)

    def test_pareto_fractional_unsupported(self):
        with pytest.raises(UnsupportedFractionalError):
            ParetoPrior(3.0, 1.0).deriv_frac(1.5, -1.0)

    def test_pointmass_fractional(self):
        pm = PointMass(2.0)
        assert pm.deriv_frac(1.5, -0.7).to_real() == pytest.approx(
            2.0 ** 1.5 * math.exp(-1.4), rel=1e-14)


class TestMellinGenericPath:
    def test_half_order_integral_closed_form(self):
        # Mellin transform of the shifted exponential mgf at 1/2:
        # lam * pi * (lam - t)^(-1/2)
        lam, t = 0.9, -0.4
        got = mellin_fractional_integral(ExponentialPrior(lam), 0.5, t)
        want = lam * math.pi / math.sqrt(lam - t)
        assert got.to_real() == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("order", [0.5, 1.5, 2.5, 3.5, 4.5, 7.2])
    def test_exact_diff_route_agrees(self, order):
        for fam in (GammaPrior(2.5, 3.0), ExponentialPrior(0.9)):
            a = deriv_frac_mellin(fam, order, -0.8)
            b = fam.deriv_frac(order, -0.8)
            assert a.log_magnitude == pytest.approx(b.log_magnitude, abs=1e-7)

    @pytest.mark.parametrize("order", [0.5, 1.5, 2.5])
    def test_central_diff_route_agrees(self, order):
        fam = ExponentialPrior(0.9)
        a = deriv_frac_mellin(fam, order, -0.4, method="central-diff")
        b = fam.deriv_frac(order, -0.4)
        assert a.log_magnitude == pytest.approx(b.log_magnitude, abs=1e-7)

    def test_central_diff_order_guard(self):
        with pytest.raises(UnsupportedFractionalError):
            deriv_frac_mellin(ExponentialPrior(1.0), 5.5, -1.0,
                              method="central-diff")

    def test_mellin_divergence_guard(self):
        # fractional-integral order above the prior tail exponent diverges
        with pytest.raises(DivergenceError):
            mellin_fractional_integral(GammaPrior(0.4, 1.0), 0.5, -1.0)
        with pytest.raises(DivergenceError):
            mellin_fractional_integral(PointMass(0.0), 0.5, -1.0)


class TestScaled:
    def test_scaling_identity(self):
        # M_{r theta}(t) = M_theta(r t)
        rng = np.random.default_rng(9)
        for fam in ALL_FAMILIES:
            for _ in range(5):
                r = float(rng.uniform(0.2, 3.0))
                t = -float(rng.uniform(0.1, 2.0))
                a = fam.scaled(r).eval(t).log_magnitude
                b = fam.eval(r * t).log_magnitude
                assert a == pytest.approx(b, rel=1e-12, abs=1e-12)

    def test_nonpositive_scale_rejected(self):
        for fam in ALL_FAMILIES:
            with pytest.raises(ValueError):
                fam.scaled(0.0)


class TestConstruction:
    @pytest.mark.parametrize("bad", [
        lambda: GammaPrior(0, 1), lambda: GammaPrior(1, -2),
        lambda: ExponentialPrior(0), lambda: ParetoPrior(-1, 1),
        lambda: ParetoPrior(1, 0), lambda: PointMass(-0.1),
    ])
    def test_invalid_parameters(self, bad):
        with pytest.raises(ValueError):
            bad()
