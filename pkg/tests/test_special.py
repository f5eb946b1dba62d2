import math

import numpy as np
import pytest

import oracles
from sisexplorer import special
from sisexplorer.errors import DomainError, NumericError

# Frozen from the quadrature/bisection oracles in oracles.py (see
# test_quantile_matches_bisection_oracle, which keeps them honest).
Z_975 = 1.959964
Z_995 = 2.575829


class TestErf:
    def test_against_stdlib(self):
        for x in np.linspace(-6.0, 6.0, 1201):
            assert special.erf(float(x)) == pytest.approx(math.erf(x), abs=2e-15)

    def test_erfc_right_tail_relative_accuracy(self):
        for x in (2.0, 4.0, 6.0, 8.0):
            assert special.erfc(x) == pytest.approx(math.erfc(x), rel=1e-13)

    def test_odd_symmetry(self):
        for x in (0.3, 1.7, 4.2):
            assert special.erf(-x) == -special.erf(x)


class TestNormalQuantile:
    def test_median_is_zero(self):
        assert special.normal_quantile(0.5) == 0.0

    def test_quantile_matches_bisection_oracle(self):
        assert oracles.bisect_normal_quantile(0.975) == pytest.approx(Z_975, abs=1e-6)
        assert oracles.bisect_normal_quantile(0.995) == pytest.approx(Z_995, abs=1e-6)
        assert special.normal_quantile(0.975) == pytest.approx(Z_975, abs=1e-6)
        assert special.normal_quantile(0.995) == pytest.approx(Z_995, abs=1e-6)

    def test_cdf_of_quantile_tight(self):
        for p in (1e-9, 1e-4, 0.02, 0.31, 0.5, 0.87, 0.999, 1 - 1e-7):
            z = special.normal_quantile(p)
            assert special.normal_cdf(z) == pytest.approx(p, abs=1e-10)

    def test_round_trip_over_z_range(self):
        for z in np.linspace(-6.0, 6.0, 241):
            p = special.normal_cdf(float(z))
            assert special.normal_quantile(p) == pytest.approx(float(z), abs=1e-8)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.3, float("nan")])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            special.normal_quantile(p)


class TestIncompleteBeta:
    def test_uniform_case(self):
        assert special.regularized_incomplete_beta(0.3, 1.0, 1.0) == pytest.approx(0.3, rel=1e-14)

    def test_symmetry_at_half(self):
        assert special.regularized_incomplete_beta(0.5, 2.5, 2.5) == pytest.approx(0.5, rel=1e-13)

    def test_integer_closed_form(self):
        # frozen: I_0.25(2,3) = 0.26171875 by the binomial expansion
        assert oracles.integer_beta(0.25, 2, 3) == 0.26171875
        assert special.regularized_incomplete_beta(0.25, 2.0, 3.0) == pytest.approx(0.26171875, rel=1e-12)

    def test_random_integer_arguments_against_enumeration(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            a = int(rng.integers(1, 9))
            b = int(rng.integers(1, 9))
            x = float(rng.uniform(0.01, 0.99))
            expected = oracles.integer_beta(x, a, b)
            got = special.regularized_incomplete_beta(x, float(a), float(b))
            assert got == pytest.approx(expected, rel=1e-11, abs=1e-13)

    def test_endpoints_exact(self):
        assert special.regularized_incomplete_beta(0.0, 3.0, 4.0) == 0.0
        assert special.regularized_incomplete_beta(1.0, 3.0, 4.0) == 1.0

    @pytest.mark.parametrize("x,a,b", [(-0.1, 1, 1), (1.1, 1, 1), (0.5, 0, 1), (0.5, 1, -2)])
    def test_domain(self, x, a, b):
        with pytest.raises(DomainError):
            special.regularized_incomplete_beta(x, a, b)

    def test_nonconvergence_is_loud(self, monkeypatch):
        monkeypatch.setattr(special, "_MAX_ITER", 1)
        with pytest.raises(NumericError):
            special.regularized_incomplete_beta(0.5, 200.0, 300.0)


class TestStudentT:
    def test_center(self):
        assert special.student_t_cdf(0.0, 7.3) == 0.5

    def test_df1_arctan_closed_form(self):
        # cdf(t; 1) = 1/2 + atan(t)/pi
        for t in (-3.0, -1.0, 1.0, 2.5):
            assert special.student_t_cdf(t, 1.0) == pytest.approx(0.5 + math.atan(t) / math.pi, abs=1e-14)
        assert special.student_t_cdf(1.0, 1.0) == pytest.approx(0.75, abs=1e-14)

    def test_df2_closed_form(self):
        # cdf(t; 2) = 1/2 + t / (2 * sqrt(2 + t^2))
        for t in (-2.0, 0.5, 1.0, 4.0):
            expected = 0.5 + t / (2.0 * math.sqrt(2.0 + t * t))
            assert special.student_t_cdf(t, 2.0) == pytest.approx(expected, abs=1e-14)
        assert special.student_t_cdf(1.0, 2.0) == pytest.approx(0.788675, abs=1e-6)

    def test_symmetry(self):
        for t in (0.2, 1.4, 3.8):
            for df in (1.0, 4.0, 17.0):
                total = special.student_t_cdf(t, df) + special.student_t_cdf(-t, df)
                assert total == pytest.approx(1.0, abs=1e-14)

    def test_against_quadrature(self):
        for df in (1, 2, 3, 5, 12, 30):
            for t in (-6.0, -1.5, 0.25, 2.0, 8.0):
                expected = oracles.t_cdf_quadrature(t, float(df))
                assert special.student_t_cdf(t, float(df)) == pytest.approx(expected, abs=1e-10)

    def test_normal_limit(self):
        for t in np.linspace(-4.0, 4.0, 17):
            assert special.student_t_cdf(float(t), 1e6) == pytest.approx(special.normal_cdf(float(t)), abs=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            special.student_t_cdf(1.0, 0.0)


class TestFCdf:
    def test_zero(self):
        assert special.f_cdf(0.0, 3.0, 4.0) == 0.0

    def test_t_identity(self):
        # F(x; 1, d2) = 2 * T(sqrt(x); d2) - 1
        for x in (0.5, 1.0, 3.0):
            for d2 in (1.0, 2.0, 9.0):
                expected = 2.0 * special.student_t_cdf(math.sqrt(x), d2) - 1.0
                assert special.f_cdf(x, 1.0, d2) == pytest.approx(expected, abs=1e-13)
        assert special.f_cdf(1.0, 1.0, 1.0) == pytest.approx(0.5, abs=1e-13)

    def test_upper_tail_limit(self):
        assert special.f_cdf(1e9, 2.0, 2.0) > 1.0 - 1e-8

    def test_against_quadrature(self):
        for d1, d2 in ((1, 1), (1, 7), (2, 2), (3, 11), (8, 4), (30, 30)):
            for x in (0.2, 1.0, 2.5, 7.0):
                expected = oracles.f_cdf_quadrature(x, float(d1), float(d2))
                assert special.f_cdf(x, float(d1), float(d2)) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("x,d1,d2", [(-0.5, 1, 1), (1.0, 0, 1), (1.0, 1, 0)])
    def test_domain(self, x, d1, d2):
        with pytest.raises(DomainError):
            special.f_cdf(x, d1, d2)


class TestMonotonicityAndPValues:
    def test_cdfs_nondecreasing_on_random_grids(self):
        rng = np.random.default_rng(11)
        grid = np.sort(rng.uniform(-9.0, 9.0, 80))
        for df in (1.0, 3.0, 25.0):
            values = [special.student_t_cdf(float(t), df) for t in grid]
            assert all(b >= a for a, b in zip(values, values[1:]))
        pgrid = np.sort(rng.uniform(1e-6, 1 - 1e-6, 80))
        zs = [special.normal_quantile(float(p)) for p in pgrid]
        assert all(b >= a for a, b in zip(zs, zs[1:]))
        xgrid = np.sort(rng.uniform(0.0, 40.0, 80))
        for d1, d2 in ((1.0, 5.0), (6.0, 3.0)):
            values = [special.f_cdf(float(x), d1, d2) for x in xgrid]
            assert all(b >= a for a, b in zip(values, values[1:]))

    def test_two_sided_p_always_in_unit_interval(self):
        rng = np.random.default_rng(17)
        for _ in range(500):
            t = float(rng.standard_cauchy() * 5)
            df = float(rng.uniform(0.5, 200))
            p = special.two_sided_p_value(t, df)
            assert 0.0 <= p <= 1.0
        assert special.two_sided_p_value(0.0, 5.0) == 1.0

    def test_underflow_clamp_and_display(self):
        assert special.clamp_underflow(1e-310) == 0.0
        assert special.clamp_underflow(1e-250) == 1e-250
        assert special.format_p_value(0.0) == "< 2.2e-16"
        assert special.format_p_value(1e-17) == "< 2.2e-16"
        assert special.format_p_value(0.04) == "0.04"
        assert special.two_sided_p_value(400.0, 500.0) == 0.0
