import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chebqls import approx_family as af
from chebqls.cheb_core import ChebNodes, ChebSeries, cheb_eval, interpolate, series_eval, sup_grid

kappas = st.floats(1.05, 200.0)


def exact_residual_bound(t, kappa):
    """1 / T_t(s(0)) in 50-digit arithmetic."""
    mpmath.mp.dps = 50
    k2 = mpmath.mpf(kappa) ** 2
    return float(1 / mpmath.chebyt(t, (k2 + 1) / (k2 - 1)))


class TestInverseApproxSpec:
    def test_degree_and_family(self):
        spec = af.InverseApproxSpec("chebiter", 4.0, 5)
        assert spec.family is af.Family.CHEBYSHEV_ITERATION
        assert spec.degree == 9
        assert spec.build().degree == 9

    def test_cks_needs_epsilon(self):
        with pytest.raises(ValueError):
            af.InverseApproxSpec("cks", 4.0, 5)
        s = af.InverseApproxSpec("cks", 4.0, 50, 0.1).build()
        assert s.parity == "odd"

    @pytest.mark.parametrize("kappa,t", [(1.0, 3), (0.5, 3), (2.0, 0)])
    def test_invariants(self, kappa, t):
        with pytest.raises(ValueError):
            af.InverseApproxSpec("gd", kappa, t)


class TestGradientDescent:
    def test_t1(self):
        np.testing.assert_allclose(af.gd_poly(1).coeffs, [1.0])

    def test_exact_t5(self):
        # exact expansion of (1 - (1 - x^2)^5) / x
        exact = [Fraction(193, 128), Fraction(-11, 16), Fraction(7, 32), Fraction(-11, 256), Fraction(1, 256)]
        np.testing.assert_allclose(af.gd_poly(5).coeffs, [float(f) for f in exact], rtol=1e-14)

    @pytest.mark.parametrize("t", [1, 2, 7, 40, 300])
    def test_value_at_one(self, t):
        assert series_eval(af.gd_poly(t), 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_interpolation_oracle(self):
        x = ChebNodes(40).nodes
        ref = interpolate((1 - (1 - x * x) ** 20) / x, "odd")
        np.testing.assert_allclose(af.gd_poly(20).coeffs, ref.coeffs[:20], atol=1e-9)

    def test_tails_against_exact_binomials(self):
        t = 60
        exact = [sum(math.comb(2 * t, t + i) for i in range(j + 1, t + 1)) / 4**t for j in range(t)]
        np.testing.assert_allclose(af.binomial_tails(t), exact, rtol=1e-13)

    @pytest.mark.parametrize("n", [1, 10, 63, 64, 65, 500, 20000])
    def test_central_binomial(self, n):
        mpmath.mp.dps = 40
        exact = float(mpmath.binomial(2 * n, n) / mpmath.mpf(4) ** n)
        assert af.central_binomial_ratio(n) == pytest.approx(exact, rel=1e-14)

    def test_residual_closed_form(self):
        t, kappa = 30, 3.0
        rep = af.residual_error(af.gd_poly(t), kappa)
        assert rep.residual_notion2 == pytest.approx((1 - 1 / kappa**2) ** t, rel=1e-9)

    def test_direct_eval(self):
        x = np.array([-0.7, 0.0, 0.2, 1.0])
        np.testing.assert_allclose(af.gd_eval(9, x), series_eval(af.gd_poly(9), x), atol=1e-13)


class TestCks:
    def test_noop_truncation(self):
        s = af.gd_poly(4)
        assert af.cks_truncate(s, 4, 0.5) is s

    def test_tail_below_epsilon(self):
        s = af.gd_poly(100)
        cut = af.cks_truncate(s, 100, 1e-3)
        keep = len(cut.coeffs)
        assert keep == af.cks_truncation_index(100, 1e-3) + 1
        assert af.dropped_tail(s, keep) <= 1e-3

    def test_two_epsilon_inverse(self):
        t = 529
        cut = af.cks_truncate(af.gd_poly(t), t, 0.5)
        rep = af.residual_error(cut, 10.0)
        assert rep.error_notion1 <= 2 * 0.5

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            af.cks_truncate(af.gd_poly(4), 4, 0.0)
        with pytest.raises(ValueError):
            af.cks_truncate(ChebSeries([1.0, 1.0]), 4, 0.1)

    def test_coefficients_decay_like_chernoff(self):
        # |c_j| = 4 P(more than t+j heads in 2t tosses) <= 4 exp(-j^2 / t)
        t = 400
        c = np.abs(af.gd_poly(t).coeffs)
        j = np.arange(t)
        assert np.all(c <= 4 * np.exp(-(j**2) / t) + 1e-300)

    @settings(max_examples=25, deadline=None)
    @given(t=st.integers(2, 800), log_eps=st.floats(-12, -0.5))
    def test_truncation_property(self, t, log_eps):
        eps = 10.0**log_eps
        full = af.gd_poly(t)
        cut = af.cks_truncate(full, t, eps)
        g = sup_grid(full.degree)
        diff = np.max(np.abs(series_eval(full, g) - series_eval(cut, g)))
        dropped = af.dropped_tail(full, len(cut.coeffs))
        assert diff <= dropped + 1e-12
        assert dropped <= eps

    def test_parameters(self):
        t, j = af.cks_parameters(2, 0.5, "table")
        assert (t, j) == (math.ceil(4 * math.log(8)), 7)
        with pytest.raises(ValueError):
            af.cks_parameters(2, 0.5, "other")

    def test_for_degree(self):
        s, t, eps = af.cks_for_degree(16, 201)
        assert s.degree <= 201
        assert af.cks_parameters(16, eps, "table")[1] <= 100


class TestChebyshevIteration:
    def test_t1(self):
        np.testing.assert_allclose(af.chebiter_coeffs(1, 2).coeffs, [1.6], rtol=1e-15)
        np.testing.assert_allclose(af.chebiter_coeffs(1, 2, "recurrence").coeffs, [1.6], rtol=1e-15)

    @pytest.mark.parametrize(
        "t,kappa,exact",
        [
            (2, 2, [Fraction(64, 41), Fraction(-32, 41)]),
            (3, 2, [Fraction(8, 5), Fraction(-64, 73), Fraction(128, 365)]),
            (4, 3, [Fraction(28413, 16448), Fraction(-19845, 16448), Fraction(12393, 16448), Fraction(-6561, 16448)]),
        ],
    )
    @pytest.mark.parametrize("method", ["fast", "recurrence"])
    def test_exact_small_cases(self, t, kappa, exact, method):
        got = af.chebiter_coeffs(t, kappa, method).coeffs
        np.testing.assert_allclose(got, [float(f) for f in exact], rtol=1e-13)

    def test_odd_at_zero(self):
        assert series_eval(af.chebiter_coeffs(1, 7.0), 0.0) == 0.0
        assert af.qt_eval(3, 4, 0.0) == 0.0

    def test_dual_path(self):
        a = af.chebiter_coeffs(64, 16).coeffs
        b = af.chebiter_coeffs(64, 16, "recurrence").coeffs
        assert np.linalg.norm(a - b) <= 1e-9 * np.linalg.norm(b)

    def test_generator_matches(self):
        for t, c in enumerate(af.iter_chebiter_coeffs(5.0, 40), start=1):
            if t in (1, 2, 17, 40):
                np.testing.assert_allclose(c, af.chebiter_coeffs(t, 5.0).coeffs, atol=1e-12)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            af.chebiter_coeffs(3, 2, "magic")

    def test_residual_at_inner_edge(self):
        x = 0.5
        assert abs(x * af.qt_eval(2, 2, x) - 1) == pytest.approx(9 / 41, rel=1e-14)

    def test_eval_matches_series(self):
        assert af.qt_eval(8, 8, 0.37) == pytest.approx(series_eval(af.chebiter_coeffs(8, 8), 0.37), abs=1e-10)

    def test_residual_recurrence_matches_closed_form(self):
        x = np.linspace(-1, 1, 201)
        for t, kappa in [(1, 3.0), (5, 2.0), (40, 30.0)]:
            s = af.s_map(x * x, kappa)
            ref = cheb_eval(t, s) / cheb_eval(t, af.s0(kappa))
            np.testing.assert_allclose(af.chebiter_residual(t, kappa, x), ref, atol=1e-13)

    def test_huge_t_stays_finite(self):
        q = af.qt_eval(5000, 1000.0, np.array([0.001, 0.5, 1.0]))
        assert np.all(np.isfinite(q))
        bound = af.chebiter_residual_bound(5000, 1000.0)
        # s0 - 1 is about 2e-6, so acosh(s0) carries a relative error near 1e-10 * t
        assert abs(0.5 * q[1] - 1) <= bound * (1 + 1e-7)
        assert abs(q[2] - 1) == pytest.approx(bound, rel=1e-7)

    @pytest.mark.parametrize("t,kappa", [(1, 2), (3, 4), (10, 8), (30, 32)])
    def test_residual_equals_bound(self, t, kappa):
        rep = af.residual_error(af.chebiter_coeffs(t, kappa), kappa)
        assert rep.residual_notion2 == pytest.approx(exact_residual_bound(t, kappa), rel=1e-9)

    def test_measured_residual_tiny(self):
        # 1/T_64(s(0)) at kappa = 2 is about 1e-31, far below series precision
        val = af.chebiter_measured_residual(64, 2.0)
        assert val == pytest.approx(exact_residual_bound(64, 2.0), rel=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(t=st.integers(1, 60), kappa=kappas)
    def test_notion_equivalence(self, t, kappa):
        rep = af.chebiter_report(t, kappa)
        assert rep.residual_notion2 <= rep.error_notion1 * (1 + 1e-9)
        assert rep.error_notion1 <= kappa * rep.residual_notion2 * (1 + 1e-9)
        assert rep.supnorm_full <= rep.coeff_norm * (1 + 1e-9)

    @settings(max_examples=20, deadline=None)
    @given(t=st.integers(1, 400), kappa=kappas)
    def test_norm_inequalities(self, t, kappa):
        c = af.chebiter_coeffs(t, kappa).coeffs
        norm, bound = af.supnorm_bound(t, kappa)
        assert norm <= bound
        assert norm <= math.sqrt(t) * np.linalg.norm(c) * (1 + 1e-12)

    @settings(max_examples=15, deadline=None)
    @given(kappa=kappas, t=st.integers(1, 80))
    def test_residual_strictly_decreasing(self, kappa, t):
        assert af.chebiter_measured_residual(t + 1, kappa) < af.chebiter_measured_residual(t, kappa)


class TestResidualError:
    def test_linear_polynomial(self):
        kappa = 1.2
        rep = af.residual_error(ChebSeries([1.0], "odd"), kappa)
        assert rep.residual_notion2 == pytest.approx(1 - 1 / kappa**2, rel=1e-12)

    def test_report_fields(self):
        rep = af.residual_error(af.chebiter_coeffs(6, 3), 3)
        assert rep.supnorm_full <= rep.coeff_norm * (1 + 1e-9)
        assert rep.error_notion1 <= 3 * rep.residual_notion2 * (1 + 1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            af.residual_error(ChebSeries([1.0], "odd"), 1.0)

    def test_domain_grid(self):
        g = af.domain_grid(11, 4.0)
        assert np.min(np.abs(g)) == pytest.approx(0.25)
        assert np.max(np.abs(g)) == 1.0


class TestDegrees:
    def test_formula_bound_convention(self):
        kappa, eps = 10.0, 1e-2
        t_gd = math.ceil(kappa**2 * math.log(kappa**2 / eps))
        assert af.min_degree("gd", kappa, eps) == 2 * t_gd - 1
        t_ci = math.ceil(0.5 * kappa * math.log(2 * kappa**2 / eps))
        assert af.min_degree("chebiter", kappa, eps) == 2 * t_ci - 1

    @pytest.mark.parametrize(
        "kappa,eps,cks,chebiter",
        [(2, 0.5, 15, 7), (10, 1e-2, 203, 101), (100, 1e-4, 3669, 1913), (1000, 1e-6, 52989, 28327)],
    )
    def test_table_convention(self, kappa, eps, cks, chebiter):
        assert af.min_degree("cks", kappa, eps, convention="table") == cks
        assert af.min_degree("chebiter", kappa, eps, convention="table") == chebiter

    def test_measured_chebiter(self):
        assert af.min_degree("chebiter", 2, 0.5, mode="measured") == 3

    def test_measured_gd(self):
        # (1 - 1/4)^t <= 0.1 first at t = 9
        assert af.min_degree("gd", 2, 0.1, mode="measured") == 17

    def test_measured_cks(self):
        d = af.min_degree("cks", 2, 0.05, mode="measured")
        s = af.gd_poly(af.cks_parameters(2, 0.05)[0]).truncated((d + 1) // 2)
        assert af.residual_error(s, 2).residual_notion2 <= 0.05
        shorter = s.truncated((d - 1) // 2)
        assert af.residual_error(shorter, 2).residual_notion2 > 0.05

    def test_measured_notion1(self):
        d2 = af.min_degree("chebiter", 8, 1e-3, mode="measured", notion=2)
        d1 = af.min_degree("chebiter", 8, 1e-3, mode="measured", notion=1)
        assert d1 >= d2

    def test_near_one_floor(self):
        d = af.min_degree("chebiter", 1 + 1e-9, 0.1)
        assert d >= 1 and d % 2 == 1 and d < 10

    def test_measured_vs_formula(self):
        for eps in (0.5, 1e-3, 1e-8):
            assert af.min_degree("chebiter", 20, eps, mode="measured") <= af.min_degree("chebiter", 20, eps)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            af.min_degree("chebiter", 2, 0.5, mode="guess")


class TestBounds:
    def test_t1(self):
        assert af.supnorm_bound(1, 2) == pytest.approx((1.6, 3.2), rel=1e-15)

    def test_large(self):
        norm, bound = af.supnorm_bound(500, 100)
        assert math.isfinite(bound) and norm <= bound

    def test_sharpened_bound(self):
        kappa, eps = 10.0, 1e-4
        t = math.ceil(0.5 * kappa * math.log(2 * kappa**2 / eps))
        _, bound = af.supnorm_bound(t, kappa)
        assert bound <= 2 * (1 + eps / kappa**2) * t

    def test_violation_detected(self):
        with pytest.raises(AssertionError):
            af.supnorm_bound(3, 2.0, ChebSeries([100.0, 0.0, 0.0], "odd"))


class TestOptimality:
    def test_t2(self):
        rep = af.optimality_check(2, 2)
        assert rep.alternation_count == 3
        assert rep.closed_form_residual == pytest.approx(9 / 41, rel=1e-14)
        assert rep.passed

    def test_t1(self):
        rep = af.optimality_check(1, 4)
        assert rep.alternation_count == 2 and rep.alternates and rep.passed

    def test_lp_matches(self):
        rep = af.optimality_check(8, 8)
        assert rep.lp_residual == pytest.approx(rep.closed_form_residual, rel=1e-6)
        assert rep.pointwise_error <= 1e-10

    def test_lp_beats_suboptimal_target(self):
        # a coarse grid lower-bounds the continuous minimax, never exceeds it
        t, kappa = 4, 3.0
        coarse = np.linspace(1 / kappa, 1, 6)
        assert af.minimax_lp(t, kappa, coarse) <= af.chebiter_residual_bound(t, kappa) * (1 + 1e-9)

    def test_alternation_points(self):
        x = af.alternation_points(5, 3.0)
        assert x[0] == pytest.approx(1 / 3) and x[-1] == pytest.approx(1.0)
        r = af.chebiter_residual(5, 3.0, x) / af.chebiter_residual_bound(5, 3.0)
        np.testing.assert_allclose(r, (-1.0) ** np.arange(6), atol=1e-12)

    def test_range(self):
        with pytest.raises(ValueError):
            af.optimality_check(33, 2)


class TestBestTruncated:
    def test_beats_parameter_rule(self):
        degs = np.array([201, 255])
        best, _ = af.best_truncated_gd(16, degs)
        for d, b in zip(degs, best):
            s, _, _ = af.cks_for_degree(16, int(d))
            assert b <= af.residual_error(s, 16).residual_notion2 * (1 + 1e-9)

    def test_chosen_t_reproduces(self):
        best, ts = af.best_truncated_gd(8, [31])
        s = af.gd_poly(int(ts[0])).truncated(16)
        g = sup_grid(31, 1 / 8, 1.0)
        assert np.max(np.abs(g * series_eval(s, g) - 1)) == pytest.approx(best[0], rel=1e-12)

    def test_rejects_even(self):
        with pytest.raises(ValueError):
            af.best_truncated_gd(8, [4])

    @pytest.mark.parametrize("kappa", [16, 32, 64])
    def test_chebiter_wins(self, kappa):
        degs = np.arange(3, 256, 12)
        cks, _ = af.best_truncated_gd(kappa, degs)
        ci = [af.chebiter_measured_residual((d + 1) // 2, kappa) for d in degs]
        assert np.all(np.array(ci) < cks)
