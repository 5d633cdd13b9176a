import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfm_lab.constructions import (
    CUBIC_EXAMPLE,
    TruncEqualRevenueSpec,
    build_cubic,
    build_piecewise_uniform,
    build_sqrtlog_family,
    build_trunc_equal_revenue,
)
from tfm_lab.distribution import (
    DiscreteDistribution,
    DistributionError,
    VirtualValueCurve,
    ZeroDensity,
    is_discrete_regular,
    is_regular,
    root_set,
    truncated_exponential,
    uniform,
    virtual_value,
    virtual_value_discrete,
)

CUBIC = build_cubic(CUBIC_EXAMPLE)
TRUNC = build_trunc_equal_revenue(TruncEqualRevenueSpec(2.0, 0.5))


def cubic_phi_roots_oracle():
    # phi_0 * f equals the cubic 5.62 v^3 - 10 v^2 + 5.62 v - 1 on the support
    r = np.roots([5.62, -10.0, 5.62, -1.0])
    return sorted(float(x.real) for x in r if abs(x.imag) < 1e-12)


def discrete_phi_oracle(values, weights, i):
    # 1-based; straight from v_i - (v_{i+1} - v_i) * P(v >= v_{i+1}) / w_i
    if i == len(values):
        return values[-1]
    tail = sum(weights[i:])
    return values[i - 1] - (values[i] - values[i - 1]) * tail / weights[i - 1]


class TestVirtualValue:
    def test_uniform_closed_form(self):
        U = uniform()
        assert virtual_value(U, 0, 0.75) == pytest.approx(0.5, abs=1e-12)
        assert virtual_value(U, 0, 0.5) == pytest.approx(0.0, abs=1e-12)
        assert virtual_value(U, 0.3, 0.9) == pytest.approx(2 * 0.9 - 1 - 0.3, abs=1e-12)

    def test_cubic_largest_root_is_near_zero(self):
        assert abs(virtual_value(CUBIC, 0, 0.845679)) < 1e-4

    def test_zero_density_raises(self):
        d = build_piecewise_uniform([(0, 1, 0.5), (2, 3, 0.5)])
        with pytest.raises(ZeroDensity):
            virtual_value(d, 0, 1.5)

    def test_curve_object(self):
        c = VirtualValueCurve(uniform(), burn=0.2)
        assert c.evaluate(0.9) == pytest.approx(c.base_curve(0.9) - 0.2)
        assert c.roots == pytest.approx([0.6], abs=1e-9)
        assert c.is_monotone


class TestRegularity:
    def test_uniform_regular(self):
        assert is_regular(uniform())

    def test_cubic_not_regular(self):
        assert not is_regular(CUBIC)

    def test_truncated_equal_revenue_regular(self):
        assert is_regular(TRUNC)

    def test_exponential_regular(self):
        assert is_regular(truncated_exponential(1.0, 5.0))

    def test_interior_gap_raises(self):
        with pytest.raises(ZeroDensity):
            is_regular(build_piecewise_uniform([(0, 1, 0.5), (2, 3, 0.5)]))


class TestRootSet:
    def test_uniform(self):
        assert root_set(uniform()) == pytest.approx([0.5], abs=1e-9)

    def test_cubic_matches_polynomial_roots(self):
        oracle = cubic_phi_roots_oracle()
        got = root_set(CUBIC)
        assert len(got) == 3
        assert got == pytest.approx(oracle, abs=1e-6)
        assert got == pytest.approx([0.380043, 0.553638, 0.845679], abs=1e-4)

    def test_truncated_equal_revenue_has_no_crossing(self):
        # phi is -1 below T=2 and 2v - 2.5 >= 1.5 above: a jump, not a root
        assert root_set(TRUNC) == []
        xs = np.linspace(0.01, 2.49, 2000)
        signs = {np.sign(virtual_value(TRUNC, 0, x)) for x in xs if abs(x - 2) > 1e-6}
        assert signs == {-1.0, 1.0}

    @pytest.mark.parametrize("dist", [uniform(), CUBIC, truncated_exponential(1.0, 5.0)],
                             ids=["uniform", "cubic", "exp"])
    @pytest.mark.parametrize("beta", [0.0, 0.1, 0.3])
    def test_sound_and_complete(self, dist, beta):
        roots = root_set(dist, beta)
        for r in roots:
            assert abs(virtual_value(dist, beta, r)) < 1e-7
        xs = np.linspace(dist.support_lo + 1e-9, dist.support_hi - 1e-9, 100_001)
        f = np.asarray(dist.pdf(xs))
        phi = xs - (1 - np.asarray(dist.cdf(xs))) / f - beta
        changes = np.nonzero(np.sign(phi[:-1]) * np.sign(phi[1:]) < 0)[0]
        dense = [0.5 * (xs[k] + xs[k + 1]) for k in changes]
        assert len(dense) == len(roots)
        assert roots == pytest.approx(dense, abs=1e-4)


class TestDiscrete:
    def test_two_point(self):
        d = DiscreteDistribution((1, 2), (Fraction(1, 2), Fraction(1, 2)))
        assert virtual_value_discrete(d, 1) == 0
        assert virtual_value_discrete(d, 2) == 2

    def test_sqrtlog_values_follow_formula(self):
        d = build_sqrtlog_family(5)
        for i in range(1, 6):
            assert virtual_value_discrete(d, i) == discrete_phi_oracle(d.values, d.weights, i)
        # atoms strictly inside the ladder have zero virtual value
        assert all(virtual_value_discrete(d, i) == 0 for i in (1, 2, 3))
        v5 = d.values[-1]
        assert virtual_value_discrete(d, 4) == 8 - (v5 - 8)
        assert float(virtual_value_discrete(d, 4)) == pytest.approx(16 - 8 * math.sqrt(5), abs=1e-9)
        assert virtual_value_discrete(d, 5) == v5
        assert not is_discrete_regular(d)

    def test_index_bounds(self):
        d = build_sqrtlog_family(5)
        with pytest.raises(IndexError):
            virtual_value_discrete(d, 0)
        with pytest.raises(IndexError):
            virtual_value_discrete(d, 6)

    def test_validation(self):
        with pytest.raises(DistributionError):
            DiscreteDistribution((1, 1), (0.5, 0.5))
        with pytest.raises(DistributionError):
            DiscreteDistribution((1, 2), (0.5, 0.6))
        with pytest.raises(DistributionError):
            DiscreteDistribution((1, 2), (1.0, 0.0))

    def test_tail_and_mean(self):
        d = DiscreteDistribution.from_points([(3, Fraction(1, 4)), (1, Fraction(3, 4))])
        assert d.values == (1, 3)
        assert d.tail(2) == Fraction(1, 4)
        assert d.tail(1) == 1
        assert d.mean() == Fraction(3, 4) + Fraction(3, 4)


rational_weights = st.lists(st.integers(1, 20), min_size=1, max_size=7)


@st.composite
def rational_discrete(draw):
    raw = draw(rational_weights)
    total = sum(raw)
    weights = [Fraction(r, total) for r in raw]
    gaps = draw(st.lists(st.fractions(Fraction(1, 10), 5, max_denominator=12),
                         min_size=len(raw), max_size=len(raw)))
    values, acc = [], Fraction(0)
    for g in gaps:
        acc += g
        values.append(acc)
    return DiscreteDistribution(tuple(values), tuple(weights))


@given(rational_discrete())
def test_discrete_myerson_identity_exact(d):
    for i in range(1, d.n + 1):
        lhs = sum(virtual_value_discrete(d, j) * d.weights[j - 1] for j in range(i, d.n + 1))
        assert lhs == d.values[i - 1] * d.tail_sums[i - 1]


@settings(max_examples=60)
@given(v=st.floats(0.05, 0.95), beta=st.floats(0.0, 1.0))
def test_shift_identity_uniform(v, beta):
    U = uniform()
    assert virtual_value(U, beta, v) == virtual_value(U, 0.0, v) - beta


@settings(max_examples=60)
@given(v=st.floats(0.05, 1.15), beta=st.floats(0.0, 0.8))
def test_shift_identity_cubic(v, beta):
    assert virtual_value(CUBIC, beta, v) == virtual_value(CUBIC, 0.0, v) - beta


@pytest.mark.parametrize("dist", [uniform(), CUBIC, TRUNC, truncated_exponential(1.0, 5.0)],
                         ids=["uniform", "cubic", "trunc", "exp"])
def test_cdf_derivative_matches_pdf(dist):
    xs = np.linspace(dist.support_lo, dist.support_hi, 2001)[1:-1]
    xs = xs[np.all(np.abs(xs[:, None] - np.array(dist.breakpoints or (-1.0,))) > 1e-3, axis=1)]
    h = 1e-6
    num = (np.asarray(dist.cdf(xs + h)) - np.asarray(dist.cdf(xs - h))) / (2 * h)
    f = np.asarray(dist.pdf(xs))
    mask = f > 0.1
    assert np.all(np.abs(num[mask] - f[mask]) <= 1e-3 * f[mask])
