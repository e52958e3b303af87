import numpy as np
import pytest

from lpwan_latency.calibration import default_calibration
from lpwan_latency.pipeline_sim import (
    DOWNLINK_HOPS,
    HopId,
    HopModel,
    InvalidParametersError,
    QueueModel,
    Scheme,
    SchemeConfig,
    SimulationError,
    ZeroSamplesError,
    canonical_hops,
    component_means,
    run_campaign,
    sample_hop,
    simulate_packet,
)


def constant_hop(hop_id, value):
    return HopModel.make(hop_id, "constant", {"value": value})


def constant_config(scheme=Scheme.CONCATENATED, hop_value=0.1):
    return SchemeConfig(
        scheme=scheme,
        uplink_hops=tuple(constant_hop(h, hop_value) for h in canonical_hops(scheme)),
        downlink_hops=tuple(constant_hop(h, hop_value) for h in DOWNLINK_HOPS),
        queue=QueueModel(polling_period_s=1e-9, offset_s=0.001),
        render=constant_hop(HopId.RENDER, hop_value),
    )


class TestCanonicalHops:
    def test_concatenated_has_eight_hops_with_gateway_serial(self):
        hops = canonical_hops(Scheme.CONCATENATED)
        assert len(hops) == 8
        assert HopId.GATEWAY_SERIAL in hops

    def test_cellular_skips_unlicensed_radio(self):
        hops = canonical_hops(Scheme.STANDALONE_CELLULAR)
        assert HopId.UNLICENSED_RADIO not in hops
        assert HopId.CELLULAR_UPLINK in hops

    def test_unlicensed_goes_over_wlan_not_cellular(self):
        hops = canonical_hops(Scheme.STANDALONE_UNLICENSED)
        assert HopId.CELLULAR_UPLINK not in hops
        assert HopId.WLAN_UPLINK in hops

    def test_unknown_tag_rejected(self):
        with pytest.raises(SimulationError):
            Scheme.from_tag("bogus")


class TestSampleHop:
    def test_constant_law_is_degenerate(self):
        rng = np.random.default_rng(0)
        hop = constant_hop(HopId.SENSOR_TX, 0.010)
        assert sample_hop(hop, rng) == 0.010

    def test_lognormal_deterministic_under_seed(self):
        hop = HopModel.make(HopId.SENSOR_TX, "lognormal", {"mu": 0.0, "sigma": 0.5})
        a = sample_hop(hop, np.random.default_rng(123))
        b = sample_hop(hop, np.random.default_rng(123))
        assert a == b

    def test_gamma_mean_matches_analytic(self):
        # Law of large numbers oracle: mean of Gamma(k=2, theta=0.05) is 0.1.
        hop = HopModel.make(HopId.SENSOR_TX, "gamma", {"shape": 2.0, "scale": 0.05})
        rng = np.random.default_rng(7)
        draws = np.array([sample_hop(hop, rng) for _ in range(100_000)])
        assert draws.mean() == pytest.approx(0.100, rel=0.01)

    def test_shifted_exponential_respects_shift(self):
        hop = HopModel.make(HopId.SENSOR_TX, "shifted_exponential", {"shift": 0.2, "scale": 0.01})
        rng = np.random.default_rng(5)
        assert all(sample_hop(hop, rng) > 0.2 for _ in range(100))

    def test_invalid_parameters(self):
        with pytest.raises(InvalidParametersError):
            HopModel.make(HopId.SENSOR_TX, "constant", {"value": 0.0})
        with pytest.raises(InvalidParametersError):
            HopModel.make(HopId.SENSOR_TX, "gamma", {"shape": -1.0, "scale": 0.1})
        with pytest.raises(InvalidParametersError):
            HopModel.make(HopId.SENSOR_TX, "weibull", {"k": 1.0})


class TestSimulatePacket:
    def test_constant_laws_sum_exactly(self):
        config = constant_config(hop_value=0.1)
        # Force the queue draw to its offset with a vanishing polling window.
        sample = simulate_packet(config, np.random.default_rng(0))
        assert sample.t_ul == pytest.approx(0.8, abs=1e-12)
        assert sample.t_dl == pytest.approx(0.2, abs=1e-12)
        assert sample.t_rend == 0.1
        assert sample.t_e2e == pytest.approx(1.101, abs=1e-9)

    def test_additivity_identity_is_exact(self):
        config = default_calibration(Scheme.CONCATENATED)
        rng = np.random.default_rng(3)
        for i in range(100):
            s = simulate_packet(config, rng, sequence_no=i)
            assert s.t_e2e - (s.t_ul + s.t_q + s.t_dl + s.t_rend) == 0.0

    def test_components_strictly_positive(self):
        config = default_calibration(Scheme.STANDALONE_UNLICENSED)
        rng = np.random.default_rng(11)
        for _ in range(200):
            s = simulate_packet(config, rng)
            assert s.t_ul > 0 and s.t_q > 0 and s.t_dl > 0 and s.t_rend > 0


class TestRunCampaign:
    def test_deterministic_for_fixed_seed(self):
        config = default_calibration(Scheme.CONCATENATED)
        a = run_campaign(config, 500, seed=42)
        b = run_campaign(config, 500, seed=42)
        assert a == b

    def test_different_seeds_differ(self):
        config = default_calibration(Scheme.CONCATENATED)
        a = run_campaign(config, 50, seed=1)
        b = run_campaign(config, 50, seed=2)
        assert a != b

    def test_single_sample_sequence_zero(self):
        config = default_calibration(Scheme.STANDALONE_CELLULAR)
        campaign = run_campaign(config, 1, seed=0)
        assert campaign.n_s == 1
        assert campaign.samples[0].sequence_no == 0

    def test_sequence_numbers_in_emission_order(self):
        config = default_calibration(Scheme.STANDALONE_CELLULAR)
        campaign = run_campaign(config, 20, seed=0)
        assert [s.sequence_no for s in campaign.samples] == list(range(20))

    def test_zero_samples_rejected(self):
        config = default_calibration(Scheme.CONCATENATED)
        with pytest.raises(ZeroSamplesError):
            run_campaign(config, 0, seed=0)

    def test_wrong_hop_chain_rejected(self):
        good = constant_config(Scheme.CONCATENATED)
        bad = SchemeConfig(
            scheme=Scheme.STANDALONE_CELLULAR,
            uplink_hops=good.uplink_hops,
            downlink_hops=good.downlink_hops,
            queue=good.queue,
            render=good.render,
        )
        with pytest.raises(InvalidParametersError):
            run_campaign(bad, 1, seed=0)


class TestComponentOrdering:
    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_default_calibration_component_ordering(self, scheme):
        config = default_calibration(scheme)
        campaign = run_campaign(config, 5000, seed=99)
        means = component_means(campaign.samples)
        assert means["t_ul"] >= means["t_dl"]
        assert 0.5 <= means["t_dl"] / means["t_rend"] <= 2.0
        assert means["t_q"] < 0.01 * means["t_e2e"]
