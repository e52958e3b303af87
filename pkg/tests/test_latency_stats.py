import math

import numpy as np
import pytest
from scipy.integrate import quad

from lpwan_latency.latency_stats import (
    DensityEstimate,
    EmptyInputError,
    EmptyRangeError,
    SummaryStats,
    TooFewSamplesError,
    ZeroBaselineError,
    ZeroSpreadError,
    cdf_empirical,
    cdf_intersections,
    cdf_kde,
    excess_latency,
    histogram,
    kde_pdf,
    kde_sd,
    mad,
    mean_sd,
    qoe_probability,
    silverman_bandwidth,
    summarize,
)

PHI = lambda x: 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def stats_with_mean(m, n=10_000):
    return SummaryStats(n=n, mean=m, sd=0.5, mad=0.4, bandwidth=0.07, kde_sd=0.51)


class TestMoments:
    def test_two_point_hand_expansion(self):
        m, s = mean_sd([2.0, 4.0])
        assert m == 3.0
        assert s == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_constant_data(self):
        m, s = mean_sd([5.0] * 10)
        assert (m, s) == (5.0, 0.0)

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamplesError):
            mean_sd([1.0])
        with pytest.raises(EmptyInputError):
            mean_sd([])


class TestMad:
    def test_five_point_brute_force(self):
        # med=3, deviations {2,1,0,1,2}, med=1 -> 1/0.6745
        assert mad([1, 2, 3, 4, 5]) == pytest.approx(1 / 0.6745, abs=1e-12)

    def test_constant_set_is_zero(self):
        assert mad([3.0] * 7) == 0.0

    def test_even_length_median_is_midpoint(self):
        # med of {1,2,3,10} = 2.5; |dev| = {1.5, .5, .5, 7.5}; med = 1.0
        assert mad([1, 2, 3, 10]) == pytest.approx(1.0 / 0.6745, abs=1e-12)

    def test_normal_consistency_monte_carlo(self):
        # 0.6745 is the standard normal upper quartile, so MAD of N(0,1)
        # draws estimates 1.
        rng = np.random.default_rng(1234)
        assert mad(rng.standard_normal(1_000_000)) == pytest.approx(1.0, rel=0.01)


class TestSilverman:
    @pytest.mark.parametrize("mad_value,expected", [
        (0.4321, 0.0725), (0.4221, 0.0709), (0.3831, 0.0643),
    ])
    def test_published_rows(self, mad_value, expected):
        assert silverman_bandwidth(mad_value, 10_000) == pytest.approx(expected, abs=5e-4)

    def test_single_sample_closed_form(self):
        assert silverman_bandwidth(1.0, 1) == pytest.approx((4 / 3) ** 0.2, abs=1e-9)

    def test_scale_homogeneity(self):
        rng = np.random.default_rng(3)
        x = rng.lognormal(0.5, 0.4, size=500)
        for c in (0.1, 10.0):
            assert mad(c * x) == pytest.approx(c * mad(x), rel=1e-12)
            assert silverman_bandwidth(mad(c * x), 500) == pytest.approx(
                c * silverman_bandwidth(mad(x), 500), rel=1e-9)

    def test_degenerate_spread_is_hard_error(self):
        with pytest.raises(ZeroSpreadError):
            silverman_bandwidth(0.0, 100)
        with pytest.raises(ZeroSpreadError):
            DensityEstimate.from_samples([2.0] * 50)


class TestKdePdf:
    def test_single_gaussian_peak(self):
        est = DensityEstimate.from_samples([0.0, 0.0], bandwidth=1.0)
        assert kde_pdf(est, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-12)

    def test_two_sample_midpoint(self):
        est = DensityEstimate.from_samples([-1.0, 1.0], bandwidth=1.0)
        expected = math.exp(-0.5) / math.sqrt(2 * math.pi)
        assert kde_pdf(est, 0.0) == pytest.approx(expected, abs=1e-12)

    def test_normalization_by_quadrature(self):
        rng = np.random.default_rng(21)
        est = DensityEstimate.from_samples(rng.lognormal(1.0, 0.3, size=400))
        lo = est.samples.min() - 10 * est.bandwidth
        hi = est.samples.max() + 10 * est.bandwidth
        integral, _ = quad(lambda t: kde_pdf(est, t), lo, hi, limit=200)
        assert integral == pytest.approx(1.0, abs=1e-6)

    def test_density_scale_homogeneity(self):
        rng = np.random.default_rng(8)
        x = rng.lognormal(1.0, 0.3, size=300)
        est = DensityEstimate.from_samples(x)
        for c in (0.1, 10.0):
            scaled = DensityEstimate.from_samples(c * x)
            t = float(np.median(x))
            assert kde_pdf(scaled, c * t) == pytest.approx(kde_pdf(est, t) / c, rel=1e-9)


class TestKdeSd:
    def test_published_rows(self):
        # sqrt(sd^2 + h^2) reproduces the printed KDE SDs.
        for sd, h, expected in [(1.2051, 0.0725, 1.2072),
                                (0.5571, 0.0709, 0.5616),
                                (0.5079, 0.0643, 0.5119)]:
            assert math.sqrt(sd**2 + h**2) == pytest.approx(expected, abs=5e-4)

    def test_variance_identity_exact(self):
        rng = np.random.default_rng(17)
        x = rng.lognormal(1.0, 0.5, size=1000)
        est = DensityEstimate.from_samples(x)
        expected = math.sqrt(x.var(ddof=0) + est.bandwidth**2)
        assert kde_sd(est) == expected

    def test_two_sample_unit_bandwidth(self):
        est = DensityEstimate.from_samples([-1.0, 1.0], bandwidth=1.0)
        assert kde_sd(est) == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_small_bandwidth_limit(self):
        x = np.array([1.0, 2.0, 3.0])
        tight = DensityEstimate.from_samples(x, bandwidth=1e-12)
        assert kde_sd(tight) == pytest.approx(x.std(ddof=0), rel=1e-9)


class TestHistogram:
    def test_bin_count_and_area(self):
        rng = np.random.default_rng(2)
        edges, heights = histogram(rng.lognormal(1, 0.3, size=10_000), n_bins=150)
        assert heights.size == 150
        area = float(np.sum(heights * np.diff(edges)))
        assert area == pytest.approx(1.0, abs=1e-9)

    def test_degenerate_range_single_bin(self):
        edges, heights = histogram([4.2] * 10, n_bins=150)
        assert heights.size == 1
        assert heights[0] * (edges[1] - edges[0]) == pytest.approx(1.0, abs=1e-9)

    def test_uniform_density_flat(self):
        rng = np.random.default_rng(4)
        edges, heights = histogram(rng.uniform(0, 1, size=1_000_000), n_bins=10)
        assert np.allclose(heights, 1.0, atol=0.02)

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            histogram([])


class TestCdfs:
    def test_empirical_counting(self):
        x = [1.0, 2.0, 3.0, 4.0]
        assert cdf_empirical(x, 2.5) == 0.5
        assert cdf_empirical(x, 0.5) == 0.0
        assert cdf_empirical(x, 4.0) == 1.0

    def test_kde_limits_and_symmetry(self):
        est = DensityEstimate.from_samples([2.0, 2.0], bandwidth=1.0)
        assert cdf_kde(est, -1e9) == pytest.approx(0.0, abs=1e-12)
        assert cdf_kde(est, 1e9) == pytest.approx(1.0, abs=1e-12)
        assert cdf_kde(est, 2.0) == pytest.approx(0.5, abs=1e-12)

    def test_kde_monotone(self):
        rng = np.random.default_rng(5)
        est = DensityEstimate.from_samples(rng.lognormal(1, 0.4, size=500))
        taus = np.sort(rng.uniform(0, 10, size=2000))
        values = np.asarray(cdf_kde(est, taus))
        assert np.all(np.diff(values) >= 0)

    def test_kde_tracks_empirical_with_plugin_bandwidth(self):
        rng = np.random.default_rng(6)
        x = rng.lognormal(1.0, 0.4, size=10_000)
        est = DensityEstimate.from_samples(x)
        grid = np.linspace(x.min(), x.max(), 400)
        gap = np.abs(np.asarray(cdf_kde(est, grid)) - np.asarray(cdf_empirical(x, grid)))
        assert gap.max() < 0.02


class TestQoe:
    def test_threshold_verdict(self):
        rng = np.random.default_rng(9)
        x = rng.lognormal(1.0, 0.2, size=2000)
        report = qoe_probability(x, float(x.max()) + 1.0)
        assert report.probability_empirical == 1.0
        assert report.meets_threshold
        report = qoe_probability(x, float(np.median(x)))
        assert report.probability_empirical == pytest.approx(0.5, abs=0.02)
        assert not report.meets_threshold

    def test_both_routes_agree(self):
        rng = np.random.default_rng(10)
        x = rng.lognormal(1.0, 0.3, size=5000)
        report = qoe_probability(x, float(np.quantile(x, 0.8)))
        assert report.probability_kde == pytest.approx(report.probability_empirical, abs=0.02)


class TestIntersections:
    def test_identical_estimates_degenerate(self):
        est = DensityEstimate.from_samples(np.linspace(1, 2, 50), bandwidth=0.1)
        assert cdf_intersections(est, est) == []

    def test_stochastically_ordered_pair_never_crosses(self):
        # Equal-bandwidth kernels shifted apart give strictly ordered CDFs.
        a = DensityEstimate.from_samples([0.0, 0.0], bandwidth=1.0)
        b = DensityEstimate.from_samples([1.0, 1.0], bandwidth=1.0)
        assert cdf_intersections(a, b, t_range=(-4.0, 5.0)) == []

    def test_different_width_normals_cross_at_analytic_point(self):
        # Phi(t) = Phi((t-1)/3) exactly at t = -0.5, value Phi(-0.5).
        a = DensityEstimate.from_samples([0.0, 0.0], bandwidth=1.0)
        b = DensityEstimate.from_samples([1.0, 1.0], bandwidth=3.0)
        crossings = cdf_intersections(a, b, t_range=(-8.0, 10.0))
        assert len(crossings) == 1
        t, f = crossings[0]
        assert t == pytest.approx(-0.5, abs=1e-4)
        assert f == pytest.approx(PHI(-0.5), abs=1e-4)

    def test_bad_range(self):
        est = DensityEstimate.from_samples([0.0, 1.0], bandwidth=1.0)
        with pytest.raises(EmptyRangeError):
            cdf_intersections(est, est, t_range=(2.0, 2.0))


class TestExcessLatency:
    def test_published_means(self):
        concat = stats_with_mean(3.1836)
        ltem = stats_with_mean(2.9000)
        lora = stats_with_mean(2.5789)
        d, pct = excess_latency(concat, ltem)
        assert d == pytest.approx(0.2836, abs=1e-9)
        assert pct == pytest.approx(9.8, abs=0.1)
        d, pct = excess_latency(concat, lora)
        assert d == pytest.approx(0.6047, abs=1e-9)
        assert pct == pytest.approx(23.5, abs=0.1)

    def test_self_comparison(self):
        s = stats_with_mean(1.5)
        assert excess_latency(s, s) == (0.0, 0.0)

    def test_zero_baseline(self):
        with pytest.raises(ZeroBaselineError):
            excess_latency(stats_with_mean(1.0), stats_with_mean(0.0))


class TestSummarize:
    def test_serialization_keys(self):
        rng = np.random.default_rng(12)
        stats = summarize(rng.lognormal(1, 0.3, size=200))
        assert set(stats.to_dict()) == {"n", "mean_s", "sd_s", "mad_s", "bandwidth", "kde_sd_s"}
        assert stats.n == 200
        assert stats.kde_sd >= stats.sd * math.sqrt(199 / 200)
