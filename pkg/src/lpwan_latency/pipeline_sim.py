"""
Seeded Monte Carlo simulation of end-to-end latency for three LPWAN schemes.

Each scheme is a fixed chain of hops.  A hop is a positive-valued latency
law (constant, lognormal, gamma or shifted exponential).  One simulated
packet draws every hop once, in a fixed order, and splits the total into
uplink, queue, downlink and render components whose sum is the end-to-end
latency by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np


class SimulationError(ValueError):
    """Base class for simulator errors."""


class InvalidParametersError(SimulationError):
    pass


class ZeroSamplesError(SimulationError):
    pass


class Scheme(str, Enum):
    """LPWAN architecture scheme."""

    STANDALONE_UNLICENSED = "lora"
    STANDALONE_CELLULAR = "ltem"
    CONCATENATED = "concat"

    @classmethod
    def from_tag(cls, tag: str) -> "Scheme":
        try:
            return cls(tag)
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise SimulationError(f"unknown scheme tag {tag!r} (valid: {valid})") from None


class HopId(str, Enum):
    SENSOR_TX = "sensor_tx"
    UNLICENSED_RADIO = "unlicensed_radio"
    GATEWAY_SERIAL = "gateway_serial"
    CELLULAR_UPLINK = "cellular_uplink"
    WLAN_UPLINK = "wlan_uplink"
    CARRIER_CORE = "carrier_core"
    BROKER_FORWARD = "broker_forward"
    CORE_INGEST = "core_ingest"
    DB_WRITE = "db_write"
    CLIENT_REQUEST = "client_request"
    CORE_RESPONSE = "core_response"
    RENDER = "render"


# Uplink hop chains per scheme.  Downlink (client request + core response)
# and render are shared by every scheme.
_UPLINK_HOPS = {
    Scheme.STANDALONE_UNLICENSED: (
        HopId.SENSOR_TX,
        HopId.UNLICENSED_RADIO,
        HopId.WLAN_UPLINK,
        HopId.CARRIER_CORE,
        HopId.BROKER_FORWARD,
        HopId.CORE_INGEST,
        HopId.DB_WRITE,
    ),
    Scheme.STANDALONE_CELLULAR: (
        HopId.SENSOR_TX,
        HopId.CELLULAR_UPLINK,
        HopId.CARRIER_CORE,
        HopId.BROKER_FORWARD,
        HopId.CORE_INGEST,
        HopId.DB_WRITE,
    ),
    Scheme.CONCATENATED: (
        HopId.SENSOR_TX,
        HopId.UNLICENSED_RADIO,
        HopId.GATEWAY_SERIAL,
        HopId.CELLULAR_UPLINK,
        HopId.CARRIER_CORE,
        HopId.BROKER_FORWARD,
        HopId.CORE_INGEST,
        HopId.DB_WRITE,
    ),
}

DOWNLINK_HOPS = (HopId.CLIENT_REQUEST, HopId.CORE_RESPONSE)


def canonical_hops(scheme: Scheme) -> tuple[HopId, ...]:
    """Uplink hop chain for a scheme, in traversal order."""
    return _UPLINK_HOPS[scheme]


DISTRIBUTION_FAMILIES = ("constant", "lognormal", "gamma", "shifted_exponential")


@dataclass(frozen=True)
class HopModel:
    """One hop's latency law: a family tag plus parameters, in seconds."""

    hop_id: HopId
    family: str
    params: tuple[tuple[str, float], ...]

    @classmethod
    def make(cls, hop_id: HopId, family: str, params: dict[str, float]) -> "HopModel":
        model = cls(hop_id=HopId(hop_id), family=family, params=tuple(sorted(params.items())))
        model.validate()
        return model

    @property
    def param_dict(self) -> dict[str, float]:
        return dict(self.params)

    def validate(self) -> None:
        p = self.param_dict
        if self.family == "constant":
            if p.get("value", 0.0) <= 0:
                raise InvalidParametersError(f"{self.hop_id.value}: constant value must be > 0")
        elif self.family == "lognormal":
            if "mu" not in p or p.get("sigma", -1.0) < 0:
                raise InvalidParametersError(f"{self.hop_id.value}: lognormal needs mu and sigma >= 0")
        elif self.family == "gamma":
            if p.get("shape", 0.0) <= 0 or p.get("scale", 0.0) <= 0:
                raise InvalidParametersError(f"{self.hop_id.value}: gamma needs shape, scale > 0")
        elif self.family == "shifted_exponential":
            if p.get("shift", -1.0) < 0 or p.get("scale", 0.0) <= 0:
                raise InvalidParametersError(
                    f"{self.hop_id.value}: shifted_exponential needs shift >= 0, scale > 0"
                )
        else:
            raise InvalidParametersError(
                f"{self.hop_id.value}: unknown family {self.family!r} "
                f"(valid: {', '.join(DISTRIBUTION_FAMILIES)})"
            )


def sample_hop(hop: HopModel, rng: np.random.Generator) -> float:
    """Draw one latency, in seconds, from the hop's law."""
    hop.validate()
    p = hop.param_dict
    if hop.family == "constant":
        return p["value"]
    if hop.family == "lognormal":
        return float(rng.lognormal(mean=p["mu"], sigma=p["sigma"]))
    if hop.family == "gamma":
        return float(rng.gamma(shape=p["shape"], scale=p["scale"]))
    # shifted_exponential
    return p["shift"] + float(rng.exponential(scale=p["scale"]))


@dataclass(frozen=True)
class QueueModel:
    """Database queuing delay: uniform over one polling period plus a write offset."""

    polling_period_s: float = 0.040
    offset_s: float = 0.001

    def validate(self) -> None:
        if self.polling_period_s <= 0 or self.offset_s <= 0:
            raise InvalidParametersError("queue polling period and offset must be > 0")

    def sample(self, rng: np.random.Generator) -> float:
        return self.offset_s + float(rng.uniform(0.0, self.polling_period_s))

    @property
    def mean_s(self) -> float:
        return self.offset_s + self.polling_period_s / 2.0


@dataclass(frozen=True)
class SchemeConfig:
    """Full latency model for one scheme: uplink chain, queue, downlink, render."""

    scheme: Scheme
    uplink_hops: tuple[HopModel, ...]
    downlink_hops: tuple[HopModel, ...]
    queue: QueueModel = field(default_factory=QueueModel)
    render: HopModel = None  # type: ignore[assignment]

    def validate(self) -> None:
        expected = canonical_hops(self.scheme)
        got = tuple(h.hop_id for h in self.uplink_hops)
        if got != expected:
            raise InvalidParametersError(
                f"uplink hops {[h.value for h in got]} do not match canonical chain "
                f"{[h.value for h in expected]} for scheme {self.scheme.value}"
            )
        if tuple(h.hop_id for h in self.downlink_hops) != DOWNLINK_HOPS:
            raise InvalidParametersError("downlink hops must be client_request, core_response")
        if self.render is None or self.render.hop_id != HopId.RENDER:
            raise InvalidParametersError("render model must use hop id 'render'")
        ids = [h.hop_id for h in self.uplink_hops + self.downlink_hops] + [self.render.hop_id]
        if len(set(ids)) != len(ids):
            raise InvalidParametersError("hop ids must be unique within a config")
        for hop in (*self.uplink_hops, *self.downlink_hops, self.render):
            hop.validate()
        self.queue.validate()


@dataclass(frozen=True)
class LatencySample:
    """One simulated packet's latency decomposition (all seconds)."""

    t_ul: float
    t_q: float
    t_dl: float
    t_rend: float
    scheme: Scheme
    sequence_no: int

    @property
    def t_e2e(self) -> float:
        # Computed, never stored: the additive identity holds exactly.
        return self.t_ul + self.t_q + self.t_dl + self.t_rend


@dataclass(frozen=True)
class Campaign:
    """A seeded batch of latency samples for one scheme."""

    samples: tuple[LatencySample, ...]
    scheme: Scheme
    seed: int
    interval_s: float = 0.5

    @property
    def n_s(self) -> int:
        return len(self.samples)

    def e2e_values(self) -> np.ndarray:
        return np.array([s.t_e2e for s in self.samples])


def simulate_packet(config: SchemeConfig, rng: np.random.Generator, sequence_no: int = 0) -> LatencySample:
    """Simulate one packet through the scheme's hop chain.

    Draw order is fixed (uplink hops, queue, downlink hops, render) so a
    given generator state always produces the same sample.
    """
    t_ul = sum(sample_hop(h, rng) for h in config.uplink_hops)
    t_q = config.queue.sample(rng)
    t_dl = sum(sample_hop(h, rng) for h in config.downlink_hops)
    t_rend = sample_hop(config.render, rng)
    return LatencySample(
        t_ul=t_ul, t_q=t_q, t_dl=t_dl, t_rend=t_rend,
        scheme=config.scheme, sequence_no=sequence_no,
    )


def run_campaign(config: SchemeConfig, n_s: int, seed: int, interval_s: float = 0.5) -> Campaign:
    """Run a deterministic campaign of `n_s` packets.

    The generator is derived from the seed alone, so (config, n_s, seed)
    fully determines the output.
    """
    if n_s < 1:
        raise ZeroSamplesError(f"campaign needs at least 1 sample, got {n_s}")
    config.validate()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    samples = tuple(simulate_packet(config, rng, sequence_no=i) for i in range(n_s))
    return Campaign(samples=samples, scheme=config.scheme, seed=seed, interval_s=interval_s)


def component_means(samples: Iterable[LatencySample]) -> dict[str, float]:
    """Mean of each latency component over a set of samples."""
    arr = np.array([[s.t_ul, s.t_q, s.t_dl, s.t_rend, s.t_e2e] for s in samples])
    means = arr.mean(axis=0)
    return dict(zip(("t_ul", "t_q", "t_dl", "t_rend", "t_e2e"), means.tolist()))
