"""
HTTP service exposing the simulator and analytics pipeline.

All endpoints are stateless: calibrations either come inline with the
request or are resolved from the packaged defaults, and datasets travel
as plain value lists.  File handling stays with the clients (the bundled
CLI reads/writes CSV locally and talks JSON to this service).
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .calibration import CalibrationError, config_from_dict, default_calibration
from .latency_stats import (
    QOE_THRESHOLD,
    DensityEstimate,
    StatsError,
    cdf_empirical,
    cdf_intersections,
    cdf_kde,
    excess_latency,
    kde_pdf,
    qoe_probability,
    summarize,
)
from .pipeline_sim import Scheme, SimulationError, canonical_hops, run_campaign
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    CompareRequest,
    CompareResponse,
    CurvePoint,
    HealthResponse,
    IntersectionOut,
    PairComparison,
    QoeEntry,
    QoeRequest,
    QoeResponse,
    SampleOut,
    SchemeInfo,
    SimulateRequest,
    SimulateResponse,
    SummaryStatsOut,
)

app = FastAPI(title="lpwan-latency", version=__version__)

_DOMAIN_ERRORS = (SimulationError, CalibrationError, StatsError, ValueError)


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/schemes", response_model=list[SchemeInfo])
def schemes() -> list[SchemeInfo]:
    return [
        SchemeInfo(tag=s.value, uplink_hops=[h.value for h in canonical_hops(s)])
        for s in Scheme
    ]


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    try:
        scheme = Scheme.from_tag(req.scheme)
        if req.calibration is not None:
            config = config_from_dict(req.calibration.model_dump())
            if config.scheme != scheme:
                raise CalibrationError(
                    f"calibration is for scheme {config.scheme.value!r}, requested {scheme.value!r}"
                )
        else:
            config = default_calibration(scheme)
        campaign = run_campaign(config, n_s=req.samples, seed=req.seed,
                                interval_s=req.interval_ms / 1000.0)
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    return SimulateResponse(
        scheme=scheme.value,
        seed=req.seed,
        samples=req.samples,
        interval_ms=req.interval_ms,
        data=[
            SampleOut(sequence_no=s.sequence_no, t_ul_s=s.t_ul, t_q_s=s.t_q,
                      t_dl_s=s.t_dl, t_rend_s=s.t_rend, t_e2e_s=s.t_e2e)
            for s in campaign.samples
        ],
    )


def _stats_out(values: np.ndarray, estimate: DensityEstimate) -> SummaryStatsOut:
    return SummaryStatsOut(**summarize(values, estimate).to_dict())


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
    try:
        values = np.asarray(req.values, dtype=float)
        estimate = DensityEstimate.from_samples(values, n_bins=req.bins)

        centers = 0.5 * (estimate.bin_edges[:-1] + estimate.bin_edges[1:])
        grid = np.linspace(values.min(), values.max(), req.curve_points)
        pdf = kde_pdf(estimate, grid)
        c_emp = cdf_empirical(values, grid)
        c_kde = cdf_kde(estimate, grid)
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    return AnalyzeResponse(
        stats=_stats_out(values, estimate),
        histogram=[CurvePoint(t_s=t, value=v) for t, v in zip(centers, estimate.bin_heights)],
        kde_pdf=[CurvePoint(t_s=t, value=v) for t, v in zip(grid, pdf)],
        cdf_empirical=[CurvePoint(t_s=t, value=v) for t, v in zip(grid, c_emp)],
        cdf_kde=[CurvePoint(t_s=t, value=v) for t, v in zip(grid, c_kde)],
    )


def _qoe_entries(values: np.ndarray, estimate: DensityEstimate,
                 targets: list[float]) -> list[QoeEntry]:
    entries = []
    for tau in targets:
        report = qoe_probability(values, tau, estimate=estimate)
        entries.append(QoeEntry(
            target_s=report.target,
            probability_empirical=report.probability_empirical,
            probability_kde=report.probability_kde,
            meets_threshold=report.meets_threshold,
        ))
    return entries


@app.post("/qoe", response_model=QoeResponse)
def qoe(req: QoeRequest) -> QoeResponse:
    try:
        values = np.asarray(req.values, dtype=float)
        estimate = DensityEstimate.from_samples(values)
        entries = _qoe_entries(values, estimate, req.targets)
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    return QoeResponse(threshold=QOE_THRESHOLD, entries=entries)


@app.post("/compare", response_model=CompareResponse)
def compare(req: CompareRequest) -> CompareResponse:
    try:
        names = [d.name for d in req.datasets]
        if len(set(names)) != len(names):
            raise StatsError("dataset names must be unique")
        arrays = {d.name: np.asarray(d.values, dtype=float) for d in req.datasets}
        estimates = {n: DensityEstimate.from_samples(v) for n, v in arrays.items()}
        stats = {n: summarize(arrays[n], estimates[n]) for n in names}

        pairs = []
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                a, b = names[i], names[j]
                delta_s, delta_pct = excess_latency(stats[a], stats[b])
                crossings = cdf_intersections(estimates[a], estimates[b])
                pairs.append(PairComparison(
                    a=a, b=b,
                    excess_mean_s=delta_s,
                    excess_mean_pct=delta_pct,
                    intersections=[IntersectionOut(t_s=t, cdf=f) for t, f in crossings],
                ))
        qoe_map = {
            n: _qoe_entries(arrays[n], estimates[n], req.targets) for n in names
        } if req.targets else {n: [] for n in names}
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    return CompareResponse(
        stats={n: SummaryStatsOut(**stats[n].to_dict()) for n in names},
        pairs=pairs,
        qoe=qoe_map,
    )
