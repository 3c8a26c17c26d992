"""Aggregation and export of simulation results.

Produces the study artifacts: flat event and awareness-ratio tables, a
per-location summary in the shape of a dataset overview table, box-plot
statistics per penetration rate, and spatial heatmaps of recorded events.
All float columns are written with six decimals so repeated exports are
byte-identical.
"""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .risk import RiskEvent
from .sim import RunResult

FLOAT_FMT = "{:.6f}"

EVENT_COLUMNS = (
    "recording_id",
    "location_id",
    "rate",
    "seed",
    "frame",
    "ego_id",
    "vru_id",
    "ego_x",
    "ego_y",
    "vru_x",
    "vru_y",
    "risk_time",
    "risk_factor",
)
EAR_COLUMNS = ("recording_id", "location_id", "rate", "seed", "frame", "ego_id", "ear")


@dataclass(frozen=True)
class SummaryStats:
    """Five-number/box-plot style summary of a sample.

    Quartiles use linear interpolation between order statistics; the
    standard deviation is the population form; whiskers are the Tukey
    1.5*IQR fences clamped to the observed extrema.
    """

    count: int
    mean: float
    stdev: float
    median: float
    q1: float
    q3: float
    lower_whisker: float
    upper_whisker: float

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "stdev": self.stdev,
            "median": self.median,
            "q1": self.q1,
            "q3": self.q3,
            "lower_whisker": self.lower_whisker,
            "upper_whisker": self.upper_whisker,
        }


def summarize(values) -> SummaryStats:
    """Summary statistics of a non-empty sample."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot summarize an empty sample")
    q1, median, q3 = (float(q) for q in np.percentile(arr, (25.0, 50.0, 75.0)))
    iqr = q3 - q1
    lo = float(arr.min())
    hi = float(arr.max())
    return SummaryStats(
        count=int(arr.size),
        mean=float(arr.mean()),
        stdev=float(arr.std()),
        median=median,
        q1=q1,
        q3=q3,
        lower_whisker=max(lo, q1 - 1.5 * iqr),
        upper_whisker=min(hi, q3 + 1.5 * iqr),
    )


@dataclass(frozen=True)
class CellStats:
    count: int
    mean_rf: float
    max_rf: float


@dataclass(frozen=True)
class HeatmapGrid:
    """Square-cell spatial histogram of event positions (ego side)."""

    origin: tuple[float, float]
    cell_size: float
    cells: dict

    def cell_bounds(self, key: tuple[int, int]) -> tuple[float, float, float, float]:
        i, j = key
        x0 = self.origin[0] + i * self.cell_size
        y0 = self.origin[1] + j * self.cell_size
        return (x0, y0, x0 + self.cell_size, y0 + self.cell_size)


def build_heatmap(events, cell_size: float = 1.0) -> HeatmapGrid:
    """Bucket events into a grid aligned to multiples of ``cell_size``.

    Every event lands in exactly one cell (cells are half-open on their
    upper edges); empty input yields an empty grid at origin (0, 0).
    """
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    events = list(events)
    if not events:
        return HeatmapGrid((0.0, 0.0), cell_size, {})
    xs = [e.ego_position[0] for e in events]
    ys = [e.ego_position[1] for e in events]
    origin = (
        math.floor(min(xs) / cell_size) * cell_size,
        math.floor(min(ys) / cell_size) * cell_size,
    )
    buckets: dict[tuple[int, int], list[float]] = defaultdict(list)
    for e in events:
        i = int(math.floor((e.ego_position[0] - origin[0]) / cell_size))
        j = int(math.floor((e.ego_position[1] - origin[1]) / cell_size))
        buckets[(i, j)].append(e.risk_factor)
    cells = {
        key: CellStats(len(rfs), sum(rfs) / len(rfs), max(rfs))
        for key, rfs in sorted(buckets.items())
    }
    return HeatmapGrid(origin, cell_size, cells)


def _event_rows(results) -> list[list]:
    rows = []
    for res in results:
        m = res.meta
        for e in res.events:
            rows.append(
                [
                    m["recording_id"],
                    m["location_id"],
                    FLOAT_FMT.format(m["rate"]),
                    m["seed"],
                    e.frame,
                    e.ego_id,
                    e.vru_id,
                    FLOAT_FMT.format(e.ego_position[0]),
                    FLOAT_FMT.format(e.ego_position[1]),
                    FLOAT_FMT.format(e.vru_position[0]),
                    FLOAT_FMT.format(e.vru_position[1]),
                    FLOAT_FMT.format(e.risk_time),
                    FLOAT_FMT.format(e.risk_factor),
                ]
            )
    return rows


def _ear_rows(results) -> list[list]:
    rows = []
    for res in results:
        m = res.meta
        for s in res.ear_samples:
            rows.append(
                [
                    m["recording_id"],
                    m["location_id"],
                    FLOAT_FMT.format(m["rate"]),
                    m["seed"],
                    s.frame,
                    s.ego_id,
                    FLOAT_FMT.format(s.value),
                ]
            )
    return rows


def _write_table(path: Path, columns, rows, fmt: str):
    if fmt == "json":
        payload = [dict(zip(columns, row)) for row in rows]
        path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
        return
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def location_summary(results) -> list[dict]:
    """Per-(location, rate) roll-up in dataset-overview shape.

    Durations, vehicle and VRU counts are summed over the location's
    recordings; event counts are averaged over seeds so the scale stays
    comparable to a single pass over the data.
    """
    by_loc_rate: dict[tuple[int, float], list[RunResult]] = defaultdict(list)
    for res in results:
        by_loc_rate[(res.meta["location_id"], res.meta["rate"])].append(res)

    rows = []
    for (loc, rate), group in sorted(by_loc_rate.items()):
        recordings = {}
        seeds = set()
        rfs = []
        n_events = 0
        for res in group:
            recordings[res.meta["recording_id"]] = res.meta
            seeds.add(res.meta["seed"])
            rfs.extend(e.risk_factor for e in res.events)
            n_events += len(res.events)
        duration_min = sum(m["duration_s"] for m in recordings.values()) / 60.0
        vehicles = sum(m["vehicle_count"] for m in recordings.values())
        vrus = sum(m["vru_count"] for m in recordings.values())
        incidences = n_events / max(1, len(seeds))
        rows.append(
            {
                "location_id": loc,
                "rate": rate,
                "duration_min": duration_min,
                "vehicles": vehicles,
                "vrus": vrus,
                "rf_incidences": incidences,
                "mean_rf": float(np.mean(rfs)) if rfs else 0.0,
                "stdev_rf": float(np.std(rfs)) if rfs else 0.0,
            }
        )
    return rows


def boxplot_stats(results) -> dict:
    """Per-rate box-plot summaries of EAR samples and event RF values."""
    ears: dict[float, list[float]] = defaultdict(list)
    rfs: dict[float, list[float]] = defaultdict(list)
    for res in results:
        rate = res.meta["rate"]
        ears[rate].extend(s.value for s in res.ear_samples)
        rfs[rate].extend(e.risk_factor for e in res.events)
    out: dict[str, dict] = {"ear": {}, "rf": {}}
    for rate in sorted(ears):
        if ears[rate]:
            out["ear"][FLOAT_FMT.format(rate)] = summarize(ears[rate]).to_dict()
    for rate in sorted(rfs):
        if rfs[rate]:
            out["rf"][FLOAT_FMT.format(rate)] = summarize(rfs[rate]).to_dict()
    return out


def export(results, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    """Write all report artifacts for a collection of run results.

    ``fmt`` selects the flat-table format (csv or json); the location
    summary is always written in both, box-plot statistics always as JSON.
    """
    if fmt not in ("csv", "json"):
        raise ValueError("format must be 'csv' or 'json'")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = sorted(
        results,
        key=lambda r: (r.meta["location_id"], r.meta["recording_id"], r.meta["rate"], r.meta["seed"]),
    )
    written = []

    ext = fmt
    events_path = out_dir / f"events.{ext}"
    _write_table(events_path, EVENT_COLUMNS, _event_rows(results), fmt)
    written.append(events_path)

    ear_path = out_dir / f"ear_samples.{ext}"
    _write_table(ear_path, EAR_COLUMNS, _ear_rows(results), fmt)
    written.append(ear_path)

    summary_rows = location_summary(results)
    summary_csv = out_dir / "summary_by_location.csv"
    with open(summary_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ("location_id", "rate", "duration_min", "vehicles", "vrus", "rf_incidences", "mean_rf", "stdev_rf")
        )
        for row in summary_rows:
            writer.writerow(
                [
                    row["location_id"],
                    FLOAT_FMT.format(row["rate"]),
                    FLOAT_FMT.format(row["duration_min"]),
                    row["vehicles"],
                    row["vrus"],
                    FLOAT_FMT.format(row["rf_incidences"]),
                    FLOAT_FMT.format(row["mean_rf"]),
                    FLOAT_FMT.format(row["stdev_rf"]),
                ]
            )
    written.append(summary_csv)
    summary_json = out_dir / "summary_by_location.json"
    summary_json.write_text(json.dumps(summary_rows, indent=1, sort_keys=True) + "\n")
    written.append(summary_json)

    box_path = out_dir / "boxplot_stats.json"
    box_path.write_text(json.dumps(boxplot_stats(results), indent=1, sort_keys=True) + "\n")
    written.append(box_path)

    by_loc_rate: dict[tuple[int, float], list] = defaultdict(list)
    for res in results:
        by_loc_rate[(res.meta["location_id"], res.meta["rate"])].extend(res.events)
    for (loc, rate), events in sorted(by_loc_rate.items()):
        if not events:
            continue
        grid = build_heatmap(events)
        path = out_dir / f"heatmap_loc{loc}_rate{FLOAT_FMT.format(rate)}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("i", "j", "x0", "y0", "count", "mean_rf", "max_rf"))
            for (i, j), cell in grid.cells.items():
                x0, y0, _, _ = grid.cell_bounds((i, j))
                writer.writerow(
                    [
                        i,
                        j,
                        FLOAT_FMT.format(x0),
                        FLOAT_FMT.format(y0),
                        cell.count,
                        FLOAT_FMT.format(cell.mean_rf),
                        FLOAT_FMT.format(cell.max_rf),
                    ]
                )
        written.append(path)
    return written


def load_events_csv(path: str | Path) -> list[dict]:
    """Read back an events table; numeric fields are parsed."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            parsed = dict(row)
            for col in ("recording_id", "location_id", "seed", "frame", "ego_id", "vru_id"):
                parsed[col] = int(row[col])
            for col in ("rate", "ego_x", "ego_y", "vru_x", "vru_y", "risk_time", "risk_factor"):
                parsed[col] = float(row[col])
            out.append(parsed)
    return out


def save_run_result(result: RunResult, out_dir: str | Path) -> Path:
    """Persist one run result as deterministic JSON."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    m = result.meta
    name = f"result_rec{m['recording_id']:02d}_rate{m['rate']:.4f}_seed{m['seed']}.json"
    path = out_dir / name
    path.write_text(json.dumps(result.to_dict(), sort_keys=True) + "\n")
    return path


def load_run_result(path: str | Path) -> RunResult:
    return RunResult.from_dict(json.loads(Path(path).read_text()))


def load_run_results(results_dir: str | Path) -> list[RunResult]:
    """Load every result_*.json from a directory, sorted by filename."""
    paths = sorted(Path(results_dir).glob("result_*.json"))
    return [load_run_result(p) for p in paths]
