"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HopModelIn(BaseModel):
    hop: str
    family: str
    params: dict[str, float]


class QueueModelIn(BaseModel):
    polling_period_s: float = 0.040
    offset_s: float = 0.001


class CalibrationIn(BaseModel):
    """Inline scheme calibration, mirroring the calibration file schema."""

    scheme: str
    uplink_hops: list[HopModelIn]
    downlink_hops: list[HopModelIn]
    queue: QueueModelIn = QueueModelIn()
    render: HopModelIn


class SimulateRequest(BaseModel):
    scheme: str
    samples: int = Field(default=10_000, ge=1)
    seed: int = 0
    interval_ms: float = Field(default=500.0, gt=0)
    calibration: CalibrationIn | None = None


class SampleOut(BaseModel):
    sequence_no: int
    t_ul_s: float
    t_q_s: float
    t_dl_s: float
    t_rend_s: float
    t_e2e_s: float


class SimulateResponse(BaseModel):
    scheme: str
    seed: int
    samples: int
    interval_ms: float
    data: list[SampleOut]


class SummaryStatsOut(BaseModel):
    n: int
    mean_s: float
    sd_s: float
    mad_s: float
    bandwidth: float
    kde_sd_s: float


class CurvePoint(BaseModel):
    t_s: float
    value: float


class AnalyzeRequest(BaseModel):
    values: list[float] = Field(min_length=2)
    bins: int = Field(default=150, ge=1)
    curve_points: int = Field(default=512, ge=2)


class AnalyzeResponse(BaseModel):
    stats: SummaryStatsOut
    histogram: list[CurvePoint]
    kde_pdf: list[CurvePoint]
    cdf_empirical: list[CurvePoint]
    cdf_kde: list[CurvePoint]


class QoeRequest(BaseModel):
    values: list[float] = Field(min_length=2)
    targets: list[float] = Field(min_length=1)


class QoeEntry(BaseModel):
    target_s: float
    probability_empirical: float
    probability_kde: float
    meets_threshold: bool


class QoeResponse(BaseModel):
    threshold: float
    entries: list[QoeEntry]


class NamedDataset(BaseModel):
    name: str
    values: list[float] = Field(min_length=2)


class CompareRequest(BaseModel):
    datasets: list[NamedDataset] = Field(min_length=2, max_length=3)
    targets: list[float] = []


class IntersectionOut(BaseModel):
    t_s: float
    cdf: float


class PairComparison(BaseModel):
    a: str
    b: str
    excess_mean_s: float
    excess_mean_pct: float
    intersections: list[IntersectionOut]


class CompareResponse(BaseModel):
    stats: dict[str, SummaryStatsOut]
    pairs: list[PairComparison]
    qoe: dict[str, list[QoeEntry]]


class SchemeInfo(BaseModel):
    tag: str
    uplink_hops: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
