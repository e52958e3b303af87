"""
Command-line front end.

The CLI is a thin client of the HTTP service: it reads and writes local
files (campaign CSVs, stats JSON, curve CSVs) and delegates all numeric
work to the service over JSON.  By default the service runs in-process,
so no server needs to be started; pass --server to target a remote one.

Every run that writes files also writes a manifest
(`<first output>.manifest.json`) with the resolved parameters, so any
output can be regenerated from its manifest alone.  On failure all
partially written outputs are removed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from . import __version__
from .calibration import load_calibration, config_to_dict
from .dataset_io import e2e_values, read_dataset, write_campaign
from .pipeline_sim import Campaign, LatencySample, Scheme


class CliError(Exception):
    pass


class ServiceClient:
    """JSON transport to the analytics service, in-process by default."""

    def __init__(self, server: str | None = None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=300.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DeprecationWarning)
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise CliError(f"service request failed: {exc}") from exc
        if response.status_code != 200:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise CliError(f"service error ({response.status_code}): {detail}")
        return response.json()

    def close(self) -> None:
        self._client.close()


class OutputSet:
    """Tracks written files so a failed run leaves nothing behind."""

    def __init__(self):
        self.paths: list[Path] = []

    def register(self, path: str | Path) -> Path:
        path = Path(path)
        self.paths.append(path)
        return path

    def write_text(self, path: str | Path, text: str) -> Path:
        path = self.register(path)
        path.write_text(text, encoding="utf-8")
        return path

    def write_json(self, path: str | Path, data) -> Path:
        return self.write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")

    def cleanup(self) -> None:
        for path in self.paths:
            try:
                path.unlink(missing_ok=True)
            except OSError:
                pass


def _write_manifest(outputs: OutputSet, command: str, params: dict,
                    inputs: list[str], primary_out: str) -> None:
    manifest = {
        "command": command,
        "tool_version": __version__,
        "parameters": params,
        "inputs": inputs,
        "outputs": [str(p) for p in outputs.paths],
    }
    outputs.write_json(str(primary_out) + ".manifest.json", manifest)


def _export_curve_pair(outputs: OutputSet, path: str,
                       main_points: list[dict], kde_points: list[dict]) -> None:
    # Two-column curve format holds one curve per file; the KDE twin goes
    # to a sibling file with a .kde infix.
    from .dataset_io import export_curve

    main = Path(path)
    kde = main.with_suffix(".kde" + main.suffix) if main.suffix else Path(str(main) + ".kde")
    export_curve([(p["t_s"], p["value"]) for p in main_points], outputs.register(main))
    export_curve([(p["t_s"], p["value"]) for p in kde_points], outputs.register(kde))


def _read_values(path: str) -> list[float]:
    return e2e_values(read_dataset(path))


def cmd_simulate(args, client: ServiceClient, outputs: OutputSet) -> None:
    payload = {
        "scheme": args.scheme,
        "samples": args.samples,
        "seed": args.seed,
        "interval_ms": args.interval,
    }
    if args.calibration:
        payload["calibration"] = config_to_dict(load_calibration(args.calibration))
    result = client.post("/simulate", payload)

    scheme = Scheme.from_tag(result["scheme"])
    samples = tuple(
        LatencySample(t_ul=s["t_ul_s"], t_q=s["t_q_s"], t_dl=s["t_dl_s"],
                      t_rend=s["t_rend_s"], scheme=scheme, sequence_no=s["sequence_no"])
        for s in result["data"]
    )
    campaign = Campaign(samples=samples, scheme=scheme, seed=result["seed"],
                        interval_s=result["interval_ms"] / 1000.0)
    rows = write_campaign(campaign, outputs.register(args.out))
    _write_manifest(outputs, "simulate", payload, inputs=[], primary_out=args.out)
    print(f"wrote {rows} samples to {args.out}")


def cmd_analyze(args, client: ServiceClient, outputs: OutputSet) -> None:
    values = _read_values(getattr(args, "in"))
    result = client.post("/analyze", {"values": values, "bins": args.bins})

    outputs.write_json(args.out_stats, result["stats"])
    if args.out_pdf:
        _export_curve_pair(outputs, args.out_pdf, result["histogram"], result["kde_pdf"])
    if args.out_cdf:
        _export_curve_pair(outputs, args.out_cdf, result["cdf_empirical"], result["cdf_kde"])
    params = {"in": getattr(args, "in"), "bins": args.bins}
    _write_manifest(outputs, "analyze", params, inputs=[getattr(args, "in")],
                    primary_out=args.out_stats)
    if args.json:
        print(json.dumps(result["stats"], sort_keys=True))
    else:
        stats = result["stats"]
        print(f"n={stats['n']} mean={stats['mean_s']:.4f}s sd={stats['sd_s']:.4f}s "
              f"mad={stats['mad_s']:.4f}s h={stats['bandwidth']:.4f} "
              f"kde_sd={stats['kde_sd_s']:.4f}s")


def cmd_compare(args, client: ServiceClient, outputs: OutputSet) -> None:
    paths = getattr(args, "in")
    if not 2 <= len(paths) <= 3:
        raise CliError(f"compare takes 2 or 3 input datasets, got {len(paths)}")
    names = []
    for p in paths:
        name = p
        while name in names:  # comparing a dataset against itself is allowed
            name += "#"
        names.append(name)
    datasets = [{"name": n, "values": _read_values(p)} for n, p in zip(names, paths)]
    result = client.post("/compare", {"datasets": datasets, "targets": args.target or []})

    if args.out:
        outputs.write_json(args.out, result)
        _write_manifest(outputs, "compare", {"in": paths, "targets": args.target or []},
                        inputs=paths, primary_out=args.out)
    if args.json or not args.out:
        print(json.dumps(result, sort_keys=True))
    else:
        for pair in result["pairs"]:
            print(f"{pair['a']} vs {pair['b']}: excess mean "
                  f"{pair['excess_mean_s']:.4f}s ({pair['excess_mean_pct']:.1f}%), "
                  f"{len(pair['intersections'])} CDF crossing(s)")


def cmd_qoe(args, client: ServiceClient, outputs: OutputSet) -> None:
    path = getattr(args, "in")
    result = client.post("/qoe", {"values": _read_values(path), "targets": args.target})
    if args.out:
        outputs.write_json(args.out, result)
        _write_manifest(outputs, "qoe", {"in": path, "targets": args.target},
                        inputs=[path], primary_out=args.out)
    if args.json or not args.out:
        print(json.dumps(result, sort_keys=True))
    else:
        for entry in result["entries"]:
            verdict = "meets" if entry["meets_threshold"] else "misses"
            print(f"target {entry['target_s']:.3f}s: P_emp={entry['probability_empirical']:.4f} "
                  f"P_kde={entry['probability_kde']:.4f} ({verdict} {result['threshold']:.2f} floor)")


def cmd_serve(args, client: ServiceClient, outputs: OutputSet) -> None:
    import uvicorn

    uvicorn.run("lpwan_latency.service:app", host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpwan-latency",
        description="Simulate and analyze LPWAN end-to-end latency",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--server", help="URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a seeded latency campaign")
    p.add_argument("--scheme", required=True, help="scheme tag: lora | ltem | concat")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--interval", type=float, default=500.0, help="inter-packet period in ms")
    p.add_argument("--calibration", help="calibration JSON file (default: shipped per-scheme)")
    p.add_argument("--out", required=True, help="campaign CSV output path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="summary stats and density curves for a dataset")
    p.add_argument("--in", required=True, help="dataset CSV input path")
    p.add_argument("--bins", type=int, default=150)
    p.add_argument("--out-stats", required=True, help="summary stats JSON output path")
    p.add_argument("--out-pdf", help="density curve CSV (histogram; KDE twin in .kde sibling)")
    p.add_argument("--out-cdf", help="CDF curve CSV (empirical; KDE twin in .kde sibling)")
    p.add_argument("--json", action="store_true", help="print stats JSON on stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="pairwise comparison of 2-3 datasets")
    p.add_argument("--in", action="append", required=True, help="dataset CSV (repeat 2-3 times)")
    p.add_argument("--target", action="append", type=float, help="QoE latency target in s (repeatable)")
    p.add_argument("--out", help="comparison JSON output path (default: stdout)")
    p.add_argument("--json", action="store_true", help="print comparison JSON on stdout")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("qoe", help="latency-target probabilities for a dataset")
    p.add_argument("--in", required=True, help="dataset CSV input path")
    p.add_argument("--target", action="append", type=float, required=True)
    p.add_argument("--out", help="QoE report JSON output path (default: stdout)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_qoe)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    outputs = OutputSet()
    client = ServiceClient(args.server)
    try:
        args.func(args, client, outputs)
    except (CliError, ValueError, OSError) as exc:
        outputs.cleanup()
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        client.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
