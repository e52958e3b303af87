"""
Default per-hop calibrations and calibration file I/O.

Published measurements only report aggregate mean/SD per scheme, so the
shipped per-hop parameters are a moment match: hop means and variances are
allocated so the analytic aggregate (sum of independent hops plus the
uniform queue term) reproduces each scheme's measured mean and SD exactly,
then each lognormal hop's (mu, sigma) is solved in closed form from its
(mean, variance) target.

Calibration file schema (JSON, one file per scheme):

    {
      "scheme": "concat",
      "uplink_hops":   [{"hop": "...", "family": "...", "params": {...}}, ...],
      "queue":         {"polling_period_s": 0.04, "offset_s": 0.001},
      "downlink_hops": [...],
      "render":        {"hop": "render", "family": "...", "params": {...}}
    }

The default calibration directory is the packaged `calibrations/` data;
override it with the LPWAN_CALIBRATION_DIR environment variable.
Regenerate the shipped files with `scripts/make_calibrations.py`.
"""

from __future__ import annotations

import json
import math
import os
from importlib import resources
from pathlib import Path

from .pipeline_sim import (
    DOWNLINK_HOPS,
    HopId,
    HopModel,
    QueueModel,
    Scheme,
    SchemeConfig,
    canonical_hops,
)


class CalibrationError(ValueError):
    pass


# Measured aggregate (mean, SD) in seconds for each scheme.
AGGREGATE_TARGETS = {
    Scheme.STANDALONE_UNLICENSED: (2.5789, 1.2051),
    Scheme.STANDALONE_CELLULAR: (2.9000, 0.5571),
    Scheme.CONCATENATED: (3.1836, 0.5079),
}

_QUEUE = QueueModel(polling_period_s=0.040, offset_s=0.001)

# Per-hop mean targets (seconds).  Downlink and render are shared shapes;
# the dominant radio hop absorbs the scheme-specific mean balance.
_HOP_MEANS = {
    Scheme.STANDALONE_UNLICENSED: {
        HopId.SENSOR_TX: 0.05,
        HopId.UNLICENSED_RADIO: 1.20,
        HopId.WLAN_UPLINK: 0.10,
        HopId.CARRIER_CORE: 0.08,
        HopId.BROKER_FORWARD: 0.05,
        HopId.CORE_INGEST: 0.05,
        HopId.DB_WRITE: 0.0279,
        HopId.CLIENT_REQUEST: 0.30,
        HopId.CORE_RESPONSE: 0.25,
        HopId.RENDER: 0.45,
    },
    Scheme.STANDALONE_CELLULAR: {
        HopId.SENSOR_TX: 0.05,
        HopId.CELLULAR_UPLINK: 1.55,
        HopId.CARRIER_CORE: 0.08,
        HopId.BROKER_FORWARD: 0.05,
        HopId.CORE_INGEST: 0.05,
        HopId.DB_WRITE: 0.099,
        HopId.CLIENT_REQUEST: 0.30,
        HopId.CORE_RESPONSE: 0.25,
        HopId.RENDER: 0.45,
    },
    Scheme.CONCATENATED: {
        HopId.SENSOR_TX: 0.05,
        HopId.UNLICENSED_RADIO: 0.30,
        HopId.GATEWAY_SERIAL: 0.05,
        HopId.CELLULAR_UPLINK: 1.55,
        HopId.CARRIER_CORE: 0.08,
        HopId.BROKER_FORWARD: 0.05,
        HopId.CORE_INGEST: 0.05,
        HopId.DB_WRITE: 0.0326,
        HopId.CLIENT_REQUEST: 0.30,
        HopId.CORE_RESPONSE: 0.25,
        HopId.RENDER: 0.45,
    },
}

# Pinned variances (s^2).  The unlicensed radio hop carries most of the
# spread for the LoRa scheme, which is what skews its aggregate right.
# Unpinned hops share the residual variance in proportion to mean^2.
_PINNED_VARS = {
    Scheme.STANDALONE_UNLICENSED: {
        HopId.UNLICENSED_RADIO: 1.43,
        HopId.CLIENT_REQUEST: 0.005,
        HopId.CORE_RESPONSE: 0.005,
        HopId.RENDER: 0.005,
    },
    Scheme.STANDALONE_CELLULAR: {
        HopId.CELLULAR_UPLINK: 0.28,
        HopId.CLIENT_REQUEST: 0.005,
        HopId.CORE_RESPONSE: 0.005,
        HopId.RENDER: 0.005,
    },
    Scheme.CONCATENATED: {
        HopId.CELLULAR_UPLINK: 0.21,
        HopId.UNLICENSED_RADIO: 0.02,
        HopId.CLIENT_REQUEST: 0.005,
        HopId.CORE_RESPONSE: 0.005,
        HopId.RENDER: 0.005,
    },
}


def lognormal_from_moments(mean: float, variance: float) -> tuple[float, float]:
    """Solve lognormal (mu, sigma) from a target mean and variance."""
    if mean <= 0 or variance <= 0:
        raise CalibrationError(f"moments must be positive, got mean={mean} var={variance}")
    sigma2 = math.log1p(variance / mean**2)
    mu = math.log(mean) - sigma2 / 2.0
    return mu, math.sqrt(sigma2)


def fit_scheme_calibration(scheme: Scheme) -> SchemeConfig:
    """Build the moment-matched default config for one scheme."""
    target_mean, target_sd = AGGREGATE_TARGETS[scheme]
    means = _HOP_MEANS[scheme]
    pinned = _PINNED_VARS[scheme]

    mean_sum = sum(means.values()) + _QUEUE.mean_s
    if abs(mean_sum - target_mean) > 1e-9:
        raise CalibrationError(f"{scheme.value}: hop means sum to {mean_sum}, want {target_mean}")

    queue_var = _QUEUE.polling_period_s**2 / 12.0
    residual = target_sd**2 - queue_var - sum(pinned.values())
    if residual <= 0:
        raise CalibrationError(f"{scheme.value}: pinned variances exceed the aggregate target")
    free = [h for h in means if h not in pinned]
    weight = sum(means[h] ** 2 for h in free)

    def hop_model(hop_id: HopId) -> HopModel:
        var = pinned.get(hop_id, residual * means[hop_id] ** 2 / weight)
        mu, sigma = lognormal_from_moments(means[hop_id], var)
        return HopModel.make(hop_id, "lognormal", {"mu": mu, "sigma": sigma})

    config = SchemeConfig(
        scheme=scheme,
        uplink_hops=tuple(hop_model(h) for h in canonical_hops(scheme)),
        downlink_hops=tuple(hop_model(h) for h in DOWNLINK_HOPS),
        queue=_QUEUE,
        render=hop_model(HopId.RENDER),
    )
    config.validate()
    return config


def config_to_dict(config: SchemeConfig) -> dict:
    def hop_dict(h: HopModel) -> dict:
        return {"hop": h.hop_id.value, "family": h.family, "params": h.param_dict}

    return {
        "scheme": config.scheme.value,
        "uplink_hops": [hop_dict(h) for h in config.uplink_hops],
        "queue": {"polling_period_s": config.queue.polling_period_s, "offset_s": config.queue.offset_s},
        "downlink_hops": [hop_dict(h) for h in config.downlink_hops],
        "render": hop_dict(config.render),
    }


def config_from_dict(data: dict) -> SchemeConfig:
    try:
        scheme = Scheme.from_tag(data["scheme"])

        def hop(entry: dict) -> HopModel:
            return HopModel.make(HopId(entry["hop"]), entry["family"], entry["params"])

        config = SchemeConfig(
            scheme=scheme,
            uplink_hops=tuple(hop(e) for e in data["uplink_hops"]),
            downlink_hops=tuple(hop(e) for e in data["downlink_hops"]),
            queue=QueueModel(**data.get("queue", {})),
            render=hop(data["render"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CalibrationError(f"bad calibration data: {exc}") from exc
    config.validate()
    return config


def load_calibration(path: str | Path) -> SchemeConfig:
    path = Path(path)
    if not path.is_file():
        raise CalibrationError(f"calibration file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def default_calibration(scheme: Scheme) -> SchemeConfig:
    """Load the shipped calibration for a scheme (env dir override honoured)."""
    filename = f"{scheme.value}.json"
    override = os.environ.get("LPWAN_CALIBRATION_DIR")
    if override:
        return load_calibration(Path(override) / filename)
    ref = resources.files("lpwan_latency").joinpath("calibrations", filename)
    return config_from_dict(json.loads(ref.read_text(encoding="utf-8")))
