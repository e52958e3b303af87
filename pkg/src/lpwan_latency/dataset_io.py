"""
CSV persistence for latency datasets and analysis curves.

Campaign/dataset schema (UTF-8, comma-separated, LF line endings):

    sample_id,scheme,t_ul_s,t_q_s,t_dl_s,t_rend_s,t_e2e_s

Seconds are written with 6 decimal places.  Component columns may be
empty (aggregate-only datasets); t_e2e_s is always required.  When all
four components are present their sum must match t_e2e_s within 1e-6 s.

Curve files are two-column CSV: t_s,value.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .pipeline_sim import Campaign

DATASET_HEADER = ["sample_id", "scheme", "t_ul_s", "t_q_s", "t_dl_s", "t_rend_s", "t_e2e_s"]
CURVE_HEADER = ["t_s", "value"]
COMPONENT_SUM_TOL = 1e-6


class DatasetError(ValueError):
    pass


class MissingFileError(DatasetError):
    pass


class BadHeaderError(DatasetError):
    pass


class BadRowError(DatasetError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class EmptyCampaignError(DatasetError):
    pass


class UnsortedInputError(DatasetError):
    pass


@dataclass(frozen=True)
class DatasetRecord:
    """One dataset row; component fields are None when absent."""

    sample_id: int
    scheme: str
    t_e2e_s: float
    t_ul_s: float | None = None
    t_q_s: float | None = None
    t_dl_s: float | None = None
    t_rend_s: float | None = None

    @property
    def components(self) -> tuple[float | None, ...]:
        return (self.t_ul_s, self.t_q_s, self.t_dl_s, self.t_rend_s)


def _parse_optional(cell: str) -> float | None:
    cell = cell.strip()
    return float(cell) if cell else None


def read_dataset(path: str | Path) -> list[DatasetRecord]:
    """Read and validate a dataset CSV.

    Rows failing validation raise BadRowError with their line number.
    Scheme tags are carried through verbatim; grouping is by tag string.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise BadHeaderError(f"{path}: empty file, expected header {','.join(DATASET_HEADER)}")
        if [h.strip() for h in header] != DATASET_HEADER:
            raise BadHeaderError(f"{path}: bad header {header!r}, expected {DATASET_HEADER}")

        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(DATASET_HEADER):
                raise BadRowError(lineno, f"expected {len(DATASET_HEADER)} columns, got {len(row)}")
            try:
                record = DatasetRecord(
                    sample_id=int(row[0]),
                    scheme=row[1].strip(),
                    t_ul_s=_parse_optional(row[2]),
                    t_q_s=_parse_optional(row[3]),
                    t_dl_s=_parse_optional(row[4]),
                    t_rend_s=_parse_optional(row[5]),
                    t_e2e_s=float(row[6]),
                )
            except ValueError as exc:
                raise BadRowError(lineno, f"unparseable value: {exc}") from exc
            if record.t_e2e_s <= 0:
                raise BadRowError(lineno, f"t_e2e_s must be > 0, got {record.t_e2e_s}")
            if all(c is not None for c in record.components):
                total = sum(record.components)  # type: ignore[arg-type]
                if abs(total - record.t_e2e_s) > COMPONENT_SUM_TOL:
                    raise BadRowError(
                        lineno,
                        f"components sum to {total:.6f} but t_e2e_s is {record.t_e2e_s:.6f}",
                    )
            records.append(record)
    return records


def e2e_values(records: Sequence[DatasetRecord]) -> list[float]:
    return [r.t_e2e_s for r in records]


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def write_campaign(campaign: Campaign, path: str | Path) -> int:
    """Write a simulated campaign in the dataset schema; returns rows written."""
    if campaign.n_s == 0:
        raise EmptyCampaignError("refusing to write an empty campaign")
    path = Path(path)
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(DATASET_HEADER)
            for s in campaign.samples:
                # Quantize components first and write the total as their sum,
                # so every written row passes the additivity check on re-read.
                parts = [round(x, 6) for x in (s.t_ul, s.t_q, s.t_dl, s.t_rend)]
                writer.writerow([
                    s.sequence_no,
                    campaign.scheme.value,
                    *(_fmt(p) for p in parts),
                    _fmt(sum(parts)),
                ])
    except OSError as exc:
        raise DatasetError(f"failed to write {path}: {exc}") from exc
    return campaign.n_s


def export_curve(points: Sequence[tuple[float, float]], path: str | Path) -> int:
    """Write a (t_s, value) curve for external plotting; returns rows written.

    Points must be ordered by t.
    """
    ts = [p[0] for p in points]
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise UnsortedInputError("curve points must be ordered by t")
    path = Path(path)
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CURVE_HEADER)
            for t, value in points:
                writer.writerow([f"{t:.6f}", f"{value:.6g}"])
    except OSError as exc:
        raise DatasetError(f"failed to write {path}: {exc}") from exc
    return len(points)
