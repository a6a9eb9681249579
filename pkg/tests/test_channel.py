import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _oracle
from conftest import random_degraded, random_dist
from poisson_wiretap import (
    ChannelParams,
    DiscreteDistribution,
    DomainError,
    IntensityConstraints,
    Side,
    TruncationOverflowError,
    TruncationPolicy,
    g_kernel,
    mi_densities,
    output_log_pmf,
    poisson_log_pmf,
    rates,
    truncation_index,
)

# Frozen values from tests/_oracle.py (mpmath, 40 digits, direct summation).
LOG_PMF_10_5_25 = -9.719223793893577762
TRUNC_MEAN_1 = 14
TRUNC_MEAN_21 = 61
LOG_G_BINARY_Y2 = -1.078889379618217513
DENS_X3 = (1.668919538925282224, 0.6197137625133438206, 1.049205776411938404)
RATES_04 = (0.8224839148841334339, 0.3439695201461895925, 0.4785143947379438414)

REF = (2.0, 1.0, 1.0, 2.0, 0.5)


# ---------------------------------------------------------------- value types


class TestChannelParams:
    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            ChannelParams(2, 0, 1, 2, 0.5)
        with pytest.raises(DomainError):
            ChannelParams(2, 1, 1, 2, -1)

    def test_degradedness(self):
        assert ChannelParams(*REF).is_degraded
        # equal gains, more eavesdropper dark current
        assert ChannelParams(1, 1, 1, 2, 0.5).is_degraded
        # eavesdropper has the better gain
        assert not ChannelParams(1, 1, 2, 2, 0.5).is_degraded
        # ratio condition broken
        assert not ChannelParams(2, 3, 1, 1, 0.5).is_degraded

    def test_identical_is_weak_only(self):
        p = ChannelParams(1, 1, 1, 1, 0.5)
        assert p.is_identical and p.is_weakly_degraded and not p.is_degraded

    def test_side_lookup(self):
        p = ChannelParams(*REF)
        assert p.side(Side.LEGITIMATE) == (2.0, 1.0)
        assert p.side("eavesdropper") == (1.0, 2.0)


class TestIntensityConstraints:
    def test_needs_one_bound(self):
        with pytest.raises(DomainError):
            IntensityConstraints()

    def test_average_clamped_to_peak(self):
        c = IntensityConstraints(peak=2.0, average=5.0)
        assert c.average == 2.0 and c.average_is_vacuous

    def test_positive(self):
        with pytest.raises(DomainError):
            IntensityConstraints(peak=-1.0)


class TestDiscreteDistribution:
    def test_validation(self):
        with pytest.raises(DomainError):
            DiscreteDistribution([1.0, 0.0], [0.5, 0.5])
        with pytest.raises(DomainError):
            DiscreteDistribution([0.0, 1.0], [0.5, 0.6])
        with pytest.raises(DomainError):
            DiscreteDistribution([-1.0], [1.0])

    def test_from_points_pools_and_sorts(self):
        d = DiscreteDistribution.from_points([3.0, 0.0, 3.0, 1.0], [0.2, 0.5, 0.2, 0.0])
        np.testing.assert_array_equal(d.locations, [0.0, 3.0])
        np.testing.assert_allclose(d.weights, [5 / 9, 4 / 9])

    def test_feasibility(self):
        d = DiscreteDistribution([0.0, 4.0], [0.75, 0.25])
        d.check_feasible(IntensityConstraints(peak=4.0, average=1.0))
        with pytest.raises(DomainError):
            d.check_feasible(IntensityConstraints(peak=3.0))
        with pytest.raises(DomainError):
            d.check_feasible(IntensityConstraints(peak=4.0, average=0.9))

    def test_dict_round_trip(self):
        d = DiscreteDistribution([0.0, 2.5, 7.0], [0.5, 0.3, 0.2])
        e = DiscreteDistribution.from_dict(d.to_dict())
        np.testing.assert_array_equal(d.locations, e.locations)
        np.testing.assert_array_equal(d.weights, e.weights)

    def test_arrays_read_only(self):
        d = DiscreteDistribution([0.0, 1.0], [0.5, 0.5])
        with pytest.raises(ValueError):
            d.weights[0] = 1.0


# ---------------------------------------------------------------- pmf and truncation


class TestPoissonLogPmf:
    def test_unit_mean_at_zero(self):
        assert poisson_log_pmf(1.0, 0) == pytest.approx(-1.0, abs=1e-15)

    def test_zero_mean(self):
        assert poisson_log_pmf(0.0, 0) == 0.0
        assert poisson_log_pmf(0.0, 3) == -math.inf

    def test_against_oracle(self):
        assert poisson_log_pmf(10.5, 25) == pytest.approx(LOG_PMF_10_5_25, abs=1e-12)

    def test_errors(self):
        with pytest.raises(DomainError):
            poisson_log_pmf(-1.0, 0)
        with pytest.raises(DomainError):
            poisson_log_pmf(1.0, -2)

    def test_broadcast(self):
        out = poisson_log_pmf(np.array([[1.0], [2.0]]), np.arange(3))
        assert out.shape == (2, 3)


class TestTruncationIndex:
    def test_zero_mean(self):
        assert truncation_index(0.0) == 0

    @pytest.mark.parametrize("mean, expected", [(1.0, TRUNC_MEAN_1), (21.0, TRUNC_MEAN_21)])
    def test_against_cumulative_sum(self, mean, expected):
        assert truncation_index(mean, TruncationPolicy(epsilon_tail=1e-12)) == expected

    def test_oracle_values_still_hold(self):
        assert _oracle.truncation_by_cumsum(1.0, 1e-12) == TRUNC_MEAN_1

    @given(st.floats(min_value=1e-3, max_value=500.0))
    @settings(max_examples=60, deadline=None)
    def test_at_least_mean_and_tail_small(self, mean):
        from scipy.special import gammainc

        k = truncation_index(mean)
        assert k >= mean
        assert gammainc(k + 1, mean) < 1e-12
        if k > math.ceil(mean):
            assert gammainc(k, mean) >= 1e-12

    def test_overflow(self):
        with pytest.raises(TruncationOverflowError) as err:
            truncation_index(5000.0, TruncationPolicy(y_max_cap=100))
        assert err.value.mean == 5000.0


# ---------------------------------------------------------------- kernels and densities


class TestGKernel:
    def test_single_point_at_origin(self):
        p = ChannelParams(*REF)
        d = DiscreteDistribution.point_mass(0.0)
        for y in (0, 1, 5):
            assert g_kernel(Side.LEGITIMATE, y, d, p) == pytest.approx(y * math.log(0.5), abs=1e-14)

    def test_binary_against_oracle(self):
        d = DiscreteDistribution([0.0, 3.0], [0.75, 0.25])
        got = g_kernel(Side.LEGITIMATE, 2, d, ChannelParams(*REF))
        assert got == pytest.approx(LOG_G_BINARY_Y2, abs=1e-13)

    def test_output_pmf_normalized(self):
        p = ChannelParams(*REF)
        d = DiscreteDistribution([0.0, 3.0, 10.0], [0.5, 0.3, 0.2])
        for side in Side:
            alpha, lam = p.side(side)
            y = np.arange(truncation_index((alpha * 10 + lam) * p.delta) + 1)
            total = np.exp(output_log_pmf(side, y, d, p)).sum()
            assert 1.0 - 1e-12 <= total <= 1.0 + 1e-14

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            g_kernel(Side.LEGITIMATE, 0, None, ChannelParams(*REF))

    def test_kernel_ratio_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            params = random_degraded(rng)
            peak = rng.uniform(0.5, 10.0)
            dist = random_dist(rng, peak)
            for side in Side:
                alpha, lam = params.side(side)
                y = np.arange(40)
                ratio = np.exp(np.diff(g_kernel(side, y, dist, params)))
                lo, hi = lam * params.delta, (alpha * peak + lam) * params.delta
                assert np.all(ratio >= lo * (1 - 1e-12))
                assert np.all(ratio <= hi * (1 + 1e-12))


class TestMiDensities:
    def test_degenerate_distribution(self):
        d = DiscreteDistribution.point_mass(2.0)
        i_b, i_e, c_s = mi_densities(2.0, d, ChannelParams(*REF))
        assert abs(i_b) < 1e-12 and abs(i_e) < 1e-12 and abs(c_s) < 1e-12

    def test_identical_channels(self):
        p = ChannelParams(1.5, 0.7, 1.5, 0.7, 0.3)
        d = DiscreteDistribution([0.0, 2.0, 5.0], [0.3, 0.3, 0.4])
        _, _, c_s = mi_densities(np.linspace(0, 6, 13), d, p)
        np.testing.assert_array_equal(c_s, 0.0)

    def test_against_kl_oracle(self):
        d = DiscreteDistribution([0.0, 3.0], [0.75, 0.25])
        got = mi_densities(3.0, d, ChannelParams(*REF))
        np.testing.assert_allclose(got, DENS_X3, rtol=0, atol=1e-9)

    def test_scalar_in_scalar_out(self):
        d = DiscreteDistribution([0.0, 3.0], [0.75, 0.25])
        out = mi_densities(1.0, d, ChannelParams(*REF))
        assert all(isinstance(v, float) for v in out)

    def test_negative_x(self):
        d = DiscreteDistribution([0.0, 3.0], [0.75, 0.25])
        with pytest.raises(DomainError):
            mi_densities(-1.0, d, ChannelParams(*REF))


class TestRates:
    def test_degenerate(self):
        out = rates(DiscreteDistribution.point_mass(0.0), ChannelParams(*REF))
        np.testing.assert_allclose(out, 0.0, atol=1e-13)

    def test_binary_against_oracle(self):
        out = rates(DiscreteDistribution([0.0, 4.0], [0.75, 0.25]), ChannelParams(*REF))
        np.testing.assert_allclose(out, RATES_04, rtol=0, atol=1e-9)

    def test_equal_channels(self):
        p = ChannelParams(2, 1, 2, 1, 0.5)
        assert rates(DiscreteDistribution([0.0, 4.0], [0.6, 0.4]), p)[2] == 0.0


# ---------------------------------------------------------------- properties


@st.composite
def instances(draw):
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    params = random_degraded(rng)
    peak = rng.uniform(0.5, 10.0)
    return params, peak, random_dist(rng, peak), rng.uniform(0.0, peak, 3)


@given(instances())
@settings(max_examples=60, deadline=None)
def test_density_matches_definitional_form(inst):
    params, peak, dist, extra = inst
    x = np.concatenate([dist.locations, extra])
    got = mi_densities(x, dist, params)
    ref = _oracle.kl_densities_np(x, dist.locations, dist.weights,
                                  (params.alpha_b, params.lambda_b, params.alpha_e,
                                   params.lambda_e, params.delta))
    for a, b in zip(got, ref):
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-9)


@given(instances())
@settings(max_examples=60, deadline=None)
def test_secrecy_rate_nonnegative_when_degraded(inst):
    params, _, dist, _ = inst
    assert rates(dist, params)[2] >= -1e-9


@given(instances(), st.floats(0.05, 0.95))
@settings(max_examples=40, deadline=None)
def test_secrecy_rate_concave_in_mixtures(inst, t):
    params, peak, d1, _ = inst
    rng = np.random.default_rng(int(t * 1e6))
    d2 = random_dist(rng, peak)
    mix = d1.mixture(d2, t)
    lhs = rates(mix, params)[2]
    rhs = t * rates(d1, params)[2] + (1 - t) * rates(d2, params)[2]
    assert lhs >= rhs - 1e-9


def test_rates_identity_with_densities():
    p = ChannelParams(*REF)
    d = DiscreteDistribution([0.0, 2.0, 6.0], [0.5, 0.3, 0.2])
    i_b, i_e, c_s = mi_densities(d.locations, d, p)
    r_b, r_e, f0 = rates(d, p)
    assert r_b == pytest.approx(d.weights @ i_b, abs=1e-14)
    assert f0 == pytest.approx(d.weights @ c_s, abs=1e-13)
