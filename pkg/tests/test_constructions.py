import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from tfm_lab.collusion_free import welfare_revenue_approx
from tfm_lab.constructions import (
    CUBIC_EXAMPLE,
    CubicSpec,
    InvalidParams,
    NoUnitRoot,
    NonnegativityViolated,
    OverlapError,
    TruncEqualRevenueSpec,
    build_cubic,
    build_piecewise_uniform,
    build_sqrtlog_family,
    build_trunc_equal_revenue,
    epsilon_smear,
    sqrt_fraction,
    sqrtlog_top,
)
from tfm_lab.distribution import DiscreteDistribution, is_regular, virtual_value
from tfm_lab.pricing import revenue

CUBIC = build_cubic(CUBIC_EXAMPLE)


class TestCubic:
    def test_cdf_formula(self):
        xs = np.linspace(0, CUBIC.support_hi, 50)
        want = 2.81 * xs - (10 / 3) * xs ** 2 + 1.405 * xs ** 3
        assert np.allclose(CUBIC.cdf(xs), want, atol=1e-12)

    def test_support_top(self):
        assert CUBIC.support_hi == pytest.approx(1.20018, abs=1e-5)
        assert float(CUBIC.cdf(CUBIC.support_hi)) == pytest.approx(1.0, abs=1e-12)

    def test_nonnegativity_condition(self):
        assert 27 / 8 * 5.62 * 5.62 == pytest.approx(106.6, abs=0.02)
        assert 27 / 8 * 5.62 * 5.62 >= 10.0 ** 2
        assert CUBIC_EXAMPLE.nonnegative
        assert CUBIC_EXAMPLE.density_floor > 0

    def test_adjusted_virtual_value_is_the_cubic(self):
        xs = np.linspace(0.01, CUBIC.support_hi - 0.01, 400)
        adjusted = xs * CUBIC.pdf(xs) - (1 - CUBIC.cdf(xs))
        assert np.allclose(adjusted, CUBIC_EXAMPLE.P(xs), atol=1e-9)

    def test_density_integrates_to_one(self):
        mass, _ = quad(lambda v: float(CUBIC.pdf(v)), 0, CUBIC.support_hi)
        assert mass == pytest.approx(1.0, abs=1e-9)

    def test_negative_density_rejected(self):
        with pytest.raises(NonnegativityViolated):
            build_cubic(CubicSpec(1.0, 10.0, 1.0))

    def test_no_unit_root(self):
        # F = v/2 - v^2/3 peaks below 1
        with pytest.raises((NoUnitRoot, NonnegativityViolated)):
            build_cubic(CubicSpec(1.0, 1.0, 0.0))

    @pytest.mark.parametrize("a,b,c", [(0, 1, 1), (1, -1, 1), (1, 1, -1)])
    def test_bad_coefficients(self, a, b, c):
        with pytest.raises(InvalidParams):
            build_cubic(CubicSpec(a, b, c))


class TestTruncEqualRevenue:
    D = build_trunc_equal_revenue(TruncEqualRevenueSpec(2.0, 0.5))

    def test_cdf_points(self):
        assert float(self.D.cdf(2.0)) == pytest.approx(2 / 3)
        assert float(self.D.cdf(2.5)) == pytest.approx(1.0)
        assert float(self.D.cdf(1.0)) == pytest.approx(0.5)

    def test_regular(self):
        assert is_regular(self.D)

    def test_virtual_value_piecewise(self):
        # equal-revenue part: v - (1-F)/f = v - (v+1) = -1
        for v in (0.3, 1.0, 1.9):
            assert float(virtual_value(self.D, 0, v)) == pytest.approx(-1.0, abs=1e-9)
        # uniform top: v - (T + eps - v)
        for v in (2.1, 2.3):
            assert float(virtual_value(self.D, 0, v)) == pytest.approx(2 * v - 2.5, abs=1e-9)

    def test_equal_revenue_below_top(self):
        for p in (0.5, 1.0, 1.5, 2.0):
            assert revenue(self.D, p, 0) == pytest.approx(p / (p + 1), abs=1e-12)

    @pytest.mark.parametrize("T", [8, 32])
    def test_welfare_gap_tracks_log(self, T):
        d = build_trunc_equal_revenue(TruncEqualRevenueSpec(T, 0.5))
        r = welfare_revenue_approx(d, T)
        assert r.revenue_ratio == pytest.approx(1.0)
        assert (1 / r.welfare_ratio) / math.log(T + 1) == pytest.approx(1.0, rel=0.15)

    @pytest.mark.parametrize("T,eps", [(0, 0.5), (2, 0), (0.5, 0.8), (3, 1.5)])
    def test_bad_params(self, T, eps):
        with pytest.raises(InvalidParams):
            TruncEqualRevenueSpec(T, eps)


class TestSqrtLog:
    def test_atoms(self):
        d = build_sqrtlog_family(5)
        s5 = math.sqrt(5)
        assert d.values[:4] == (1, 2, 4, 8)
        assert float(d.values[4]) == pytest.approx(8 * s5)
        assert d.weights == tuple(Fraction(1, 2 ** i) for i in (1, 2, 3, 4, 4))
        assert sum(d.weights) == 1
        assert sqrtlog_top(5) == pytest.approx(8 * s5)

    def test_perfect_square_top_is_exact(self):
        assert sqrt_fraction(16) == 4
        assert build_sqrtlog_family(16).values[-1] == 4 * 2 ** 14

    @pytest.mark.parametrize("n", [5, 9, 16])
    def test_equal_revenue_ladder(self, n):
        d = build_sqrtlog_family(n)
        for v in d.values[:-1]:
            assert revenue(d, v, 0) == 1
        assert float(revenue(d, d.values[-1], 0)) == pytest.approx(math.sqrt(n) / 2)

    @pytest.mark.parametrize("n", [4, 5.0, "7"])
    def test_guard(self, n):
        with pytest.raises(InvalidParams):
            build_sqrtlog_family(n)


class TestSmear:
    def test_density_value(self):
        d = epsilon_smear(DiscreteDistribution((1, 2), (Fraction(1, 2), Fraction(1, 2))), 0.1)
        assert float(d.pdf(1.05)) == pytest.approx(5.0)
        assert float(d.pdf(1.5)) == 0.0

    def test_total_mass(self):
        d = epsilon_smear(build_sqrtlog_family(5), 0.01)
        total = sum(quad(lambda v: float(d.pdf(v)), lo, hi)[0] for _, lo, hi, _ in d.pieces)
        assert total == pytest.approx(1.0, abs=1e-12)
        assert float(d.cdf(d.support_hi)) == pytest.approx(1.0, abs=1e-12)

    def test_overlap(self):
        with pytest.raises(OverlapError):
            epsilon_smear(DiscreteDistribution((1, 2), (Fraction(1, 2), Fraction(1, 2))), 0.5)

    def test_nonpositive_eps(self):
        with pytest.raises(InvalidParams):
            epsilon_smear(build_sqrtlog_family(5), 0)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.5, 4.0), st.floats(0.01, 0.2))
    def test_tail_sandwiched_by_atoms(self, price, eps):
        base = build_sqrtlog_family(5)
        d = epsilon_smear(base, eps)
        # smearing moves each atom up by at most eps, so the tail is sandwiched
        tail = float(revenue(d, price, 0)) / price
        assert tail >= float(revenue(base, price, 0)) / price - 1e-9
        assert tail <= float(revenue(base, price - eps, 0)) / (price - eps) + 1e-9


class TestPiecewise:
    def test_gap(self):
        d = build_piecewise_uniform([(0, 1, 0.5), (2, 3, 0.5)])
        assert float(d.cdf(1.5)) == pytest.approx(0.5)
        assert float(d.pdf(1.5)) == 0.0

    def test_mass_must_sum_to_one(self):
        with pytest.raises(InvalidParams):
            build_piecewise_uniform([(0, 1, 0.5)])

    def test_overlap(self):
        with pytest.raises(OverlapError):
            build_piecewise_uniform([(0, 2, 0.5), (1, 3, 0.5)])
