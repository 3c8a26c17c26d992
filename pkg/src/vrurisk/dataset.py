"""Trajectory recording I/O and access.

Recordings follow the drone-dataset CSV layout: per recording a
``XX_tracks.csv`` with one row per agent per frame, a ``XX_tracksMeta.csv``
with agent lifespans and classes, and a ``XX_recordingMeta.csv`` with
recording-level attributes. Positions are meters in a local frame, headings
degrees on disk (radians in memory), frames tick at ``frame_rate`` Hz.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

TRACKS_COLUMNS = (
    "recordingId",
    "trackId",
    "frame",
    "xCenter",
    "yCenter",
    "heading",
    "width",
    "length",
    "xVelocity",
    "yVelocity",
)
TRACKS_META_COLUMNS = ("trackId", "initialFrame", "finalFrame", "class")
RECORDING_META_COLUMNS = ("recordingId", "locationId", "frameRate")

# Footprints assumed for VRU rows that carry no dimensions.
VRU_DEFAULT_DIMS = {"pedestrian": (0.5, 0.5), "bicycle": (2.0, 0.7)}

# Allowed speed-vs-displacement slack when sanity checking tracks (m/s).
_DISPLACEMENT_SLACK = 2.0
# Heading/velocity angular mismatch that triggers a load warning (rad).
_HEADING_WARN = 0.2
_HEADING_WARN_SPEED = 0.1


class SchemaError(ValueError):
    """A CSV file does not match the expected column or value schema."""


class IntegrityError(ValueError):
    """Structurally valid files describe an inconsistent recording."""


class AgentClass(Enum):
    CAR = "car"
    TRUCK_BUS = "truck_bus"
    BICYCLE = "bicycle"
    PEDESTRIAN = "pedestrian"

    @property
    def is_vru(self) -> bool:
        return self in (AgentClass.BICYCLE, AgentClass.PEDESTRIAN)

    @property
    def is_vehicle(self) -> bool:
        return not self.is_vru


@dataclass(frozen=True)
class AgentMeta:
    """Per-agent constants: identity, class, footprint, lifespan."""

    agent_id: int
    agent_class: AgentClass
    length: float
    width: float
    initial_frame: int
    final_frame: int

    def __post_init__(self):
        if self.final_frame < self.initial_frame:
            raise IntegrityError(f"agent {self.agent_id}: final frame precedes initial frame")
        if self.length <= 0.0 or self.width <= 0.0:
            raise IntegrityError(f"agent {self.agent_id}: non-positive dimensions")


@dataclass(frozen=True)
class KinematicState:
    """Instantaneous pose: position (m), speed (m/s), heading (rad), velocity (m/s)."""

    position: tuple[float, float]
    speed: float
    heading: float
    velocity: tuple[float, float]

    def __post_init__(self):
        norm = math.hypot(self.velocity[0], self.velocity[1])
        if abs(self.speed - norm) > 1e-6 * max(1.0, norm):
            raise ValueError("speed does not match velocity magnitude")
        object.__setattr__(self, "heading", self.heading % (2.0 * math.pi))


def state_from_velocity(x: float, y: float, vx: float, vy: float, heading: float | None = None) -> KinematicState:
    """Build a state, deriving speed (and heading if omitted) from velocity."""
    speed = math.hypot(vx, vy)
    if heading is None:
        heading = math.atan2(vy, vx) if speed > 0.0 else 0.0
    return KinematicState((x, y), speed, heading, (vx, vy))


@dataclass(frozen=True)
class AgentTrack:
    """An agent's metadata plus its dense per-frame state arrays."""

    meta: AgentMeta
    xy: np.ndarray  # (n, 2)
    velocity: np.ndarray  # (n, 2)
    speed: np.ndarray  # (n,)
    heading: np.ndarray  # (n,)

    def __post_init__(self):
        expected = self.meta.final_frame - self.meta.initial_frame + 1
        if self.xy.shape[0] != expected:
            raise IntegrityError(
                f"agent {self.meta.agent_id}: {self.xy.shape[0]} states for {expected} frames"
            )
        for name in ("xy", "velocity", "speed", "heading"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def covers(self, frame: int) -> bool:
        return self.meta.initial_frame <= frame <= self.meta.final_frame

    def state_at(self, frame: int) -> KinematicState:
        if not self.covers(frame):
            raise IntegrityError(f"agent {self.meta.agent_id} absent at frame {frame}")
        i = frame - self.meta.initial_frame
        return KinematicState(
            (float(self.xy[i, 0]), float(self.xy[i, 1])),
            float(self.speed[i]),
            float(self.heading[i]),
            (float(self.velocity[i, 0]), float(self.velocity[i, 1])),
        )


@dataclass(frozen=True)
class Recording:
    """A complete recording: agents keyed by id plus global attributes."""

    recording_id: int
    location_id: int
    frame_rate: float
    frame_count: int
    agents: dict

    def agent_ids(self) -> list[int]:
        return sorted(self.agents)

    def agents_at(self, frame: int) -> list[tuple[AgentMeta, KinematicState]]:
        """All agents present at a frame, sorted by agent id."""
        if not (0 <= frame < self.frame_count):
            raise IndexError(f"frame {frame} outside [0, {self.frame_count})")
        out = []
        for aid in sorted(self.agents):
            track = self.agents[aid]
            if track.covers(frame):
                out.append((track.meta, track.state_at(frame)))
        return out

    def vehicle_metas(self) -> list[AgentMeta]:
        return [t.meta for _, t in sorted(self.agents.items()) if t.meta.agent_class.is_vehicle]

    def vru_metas(self) -> list[AgentMeta]:
        return [t.meta for _, t in sorted(self.agents.items()) if t.meta.agent_class.is_vru]


@dataclass(frozen=True)
class PlannedPath:
    """Future trajectory samples for one agent from a given frame.

    ``times`` are offsets from the query frame (strictly increasing, starting
    at zero), ``positions`` the matching centers, ``arcs`` cumulative arc
    length along the samples.
    """

    times: np.ndarray
    positions: np.ndarray
    arcs: np.ndarray

    def __post_init__(self):
        for name in ("times", "positions", "arcs"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])


def planned_path(recording: Recording, agent_id: int, frame: int, horizon: float) -> PlannedPath:
    """Replay-based plan: the agent's own future track up to ``horizon`` seconds.

    Truncated at the agent's final frame when it leaves earlier.
    """
    track = recording.agents.get(agent_id)
    if track is None:
        raise KeyError(f"unknown agent {agent_id}")
    if not track.covers(frame):
        raise IntegrityError(f"agent {agent_id} absent at frame {frame}")
    steps = int(math.floor(horizon * recording.frame_rate + 1e-9))
    last = min(track.meta.final_frame, frame + steps)
    i0 = frame - track.meta.initial_frame
    i1 = last - track.meta.initial_frame + 1
    positions = track.xy[i0:i1]
    times = np.arange(i1 - i0, dtype=np.float64) / recording.frame_rate
    seg = np.diff(positions, axis=0)
    arcs = np.concatenate([[0.0], np.cumsum(np.hypot(seg[:, 0], seg[:, 1]))])
    return PlannedPath(times, positions, arcs)


def _require_columns(fieldnames, required, path: Path):
    present = set(fieldnames or ())
    for col in required:
        if col not in present:
            raise SchemaError(f"{path.name}: missing required column '{col}'")


def _parse_float(row: dict, col: str, path: Path) -> float:
    raw = (row.get(col) or "").strip()
    if raw == "":
        return math.nan
    try:
        return float(raw)
    except ValueError as exc:
        raise SchemaError(f"{path.name}: bad value for '{col}': {raw!r}") from exc


def _parse_int(row: dict, col: str, path: Path) -> int:
    raw = (row.get(col) or "").strip()
    try:
        return int(float(raw))
    except ValueError as exc:
        raise SchemaError(f"{path.name}: bad value for '{col}': {raw!r}") from exc


def load_recording(dataset_dir: str | Path, recording_id: int) -> Recording:
    """Load one recording's three CSV files from a dataset directory."""
    dataset_dir = Path(dataset_dir)
    prefix = f"{recording_id:02d}_"
    rec_meta_path = dataset_dir / f"{prefix}recordingMeta.csv"
    tracks_meta_path = dataset_dir / f"{prefix}tracksMeta.csv"
    tracks_path = dataset_dir / f"{prefix}tracks.csv"
    for p in (rec_meta_path, tracks_meta_path, tracks_path):
        if not p.exists():
            raise FileNotFoundError(f"missing recording file: {p}")

    with open(rec_meta_path, newline="") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, RECORDING_META_COLUMNS, rec_meta_path)
        rows = list(reader)
    if len(rows) != 1:
        raise SchemaError(f"{rec_meta_path.name}: expected exactly one row")
    rec_row = rows[0]
    location_id = _parse_int(rec_row, "locationId", rec_meta_path)
    frame_rate = _parse_float(rec_row, "frameRate", rec_meta_path)
    if not (frame_rate > 0):
        raise SchemaError(f"{rec_meta_path.name}: frameRate must be positive")

    metas: dict[int, dict] = {}
    with open(tracks_meta_path, newline="") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, TRACKS_META_COLUMNS, tracks_meta_path)
        for row in reader:
            tid = _parse_int(row, "trackId", tracks_meta_path)
            cls_raw = (row.get("class") or "").strip()
            try:
                cls = AgentClass(cls_raw)
            except ValueError:
                raise SchemaError(
                    f"{tracks_meta_path.name}: unknown agent class '{cls_raw}' for track {tid}"
                ) from None
            metas[tid] = {
                "class": cls,
                "initial": _parse_int(row, "initialFrame", tracks_meta_path),
                "final": _parse_int(row, "finalFrame", tracks_meta_path),
            }

    rows_by_track: dict[int, list] = {tid: [] for tid in metas}
    with open(tracks_path, newline="") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, TRACKS_COLUMNS, tracks_path)
        for row in reader:
            tid = _parse_int(row, "trackId", tracks_path)
            if tid not in rows_by_track:
                raise IntegrityError(f"track {tid} appears in tracks but not in tracksMeta")
            rows_by_track[tid].append(
                (
                    _parse_int(row, "frame", tracks_path),
                    _parse_float(row, "xCenter", tracks_path),
                    _parse_float(row, "yCenter", tracks_path),
                    _parse_float(row, "heading", tracks_path),
                    _parse_float(row, "width", tracks_path),
                    _parse_float(row, "length", tracks_path),
                    _parse_float(row, "xVelocity", tracks_path),
                    _parse_float(row, "yVelocity", tracks_path),
                )
            )

    agents: dict[int, AgentTrack] = {}
    heading_mismatches = 0
    displacement_flags = 0
    for tid, info in metas.items():
        rows = sorted(rows_by_track[tid], key=lambda r: r[0])
        if not rows:
            raise IntegrityError(f"agent {tid}: no track rows")
        frames = [r[0] for r in rows]
        expected = list(range(info["initial"], info["final"] + 1))
        if frames != expected:
            raise IntegrityError(f"agent {tid}: frames are not contiguous over its lifespan")

        width, length = rows[0][4], rows[0][5]
        cls = info["class"]
        if cls.is_vru and (not width > 0 or not length > 0 or math.isnan(width) or math.isnan(length)):
            length, width = VRU_DEFAULT_DIMS[cls.value]
        if math.isnan(width) or math.isnan(length) or width <= 0 or length <= 0:
            raise IntegrityError(f"agent {tid}: vehicle rows lack usable dimensions")

        arr = np.asarray([r[1:] for r in rows], dtype=np.float64)
        xy = arr[:, 0:2]
        heading = np.deg2rad(arr[:, 2]) % (2.0 * math.pi)
        vel = arr[:, 5:7]
        speed = np.hypot(vel[:, 0], vel[:, 1])

        moving = speed > _HEADING_WARN_SPEED
        if moving.any():
            vel_heading = np.arctan2(vel[moving, 1], vel[moving, 0])
            diff = np.abs((vel_heading - heading[moving] + math.pi) % (2.0 * math.pi) - math.pi)
            heading_mismatches += int((diff > _HEADING_WARN).sum())
        if len(rows) > 1:
            step = np.hypot(np.diff(xy[:, 0]), np.diff(xy[:, 1]))
            limit = (speed[:-1] + _DISPLACEMENT_SLACK) / frame_rate
            displacement_flags += int((step > limit).sum())

        meta = AgentMeta(tid, cls, float(length), float(width), info["initial"], info["final"])
        agents[tid] = AgentTrack(meta, xy, vel, speed, heading)

    if heading_mismatches:
        log.warning(
            "recording %d: %d states whose heading deviates from velocity direction",
            recording_id,
            heading_mismatches,
        )
    if displacement_flags:
        log.warning(
            "recording %d: %d frame steps with implausible displacement",
            recording_id,
            displacement_flags,
        )

    frame_count = max((m["final"] for m in metas.values()), default=-1) + 1
    return Recording(recording_id, location_id, float(frame_rate), frame_count, agents)


def write_recording(recording: Recording, out_dir: str | Path) -> list[Path]:
    """Write a recording back to the three-file CSV layout.

    Floats are written with six decimals, headings in degrees; reloading a
    written recording reproduces the written values exactly.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = f"{recording.recording_id:02d}_"

    rec_meta_path = out_dir / f"{prefix}recordingMeta.csv"
    with open(rec_meta_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORDING_META_COLUMNS)
        writer.writerow([recording.recording_id, recording.location_id, f"{recording.frame_rate:.6f}"])

    tracks_meta_path = out_dir / f"{prefix}tracksMeta.csv"
    with open(tracks_meta_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACKS_META_COLUMNS)
        for aid in sorted(recording.agents):
            meta = recording.agents[aid].meta
            writer.writerow([aid, meta.initial_frame, meta.final_frame, meta.agent_class.value])

    tracks_path = out_dir / f"{prefix}tracks.csv"
    with open(tracks_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACKS_COLUMNS)
        for aid in sorted(recording.agents):
            track = recording.agents[aid]
            meta = track.meta
            for i in range(track.xy.shape[0]):
                writer.writerow(
                    [
                        recording.recording_id,
                        aid,
                        meta.initial_frame + i,
                        f"{track.xy[i, 0]:.6f}",
                        f"{track.xy[i, 1]:.6f}",
                        f"{math.degrees(track.heading[i]) % 360.0:.6f}",
                        f"{meta.width:.6f}",
                        f"{meta.length:.6f}",
                        f"{track.velocity[i, 0]:.6f}",
                        f"{track.velocity[i, 1]:.6f}",
                    ]
                )
    return [tracks_path, tracks_meta_path, rec_meta_path]


def discover_recordings(dataset_dir: str | Path) -> list[int]:
    """Recording ids available in a dataset directory, ascending."""
    out = []
    for p in sorted(Path(dataset_dir).glob("*_recordingMeta.csv")):
        stem = p.name.split("_")[0]
        try:
            out.append(int(stem))
        except ValueError:
            continue
    return sorted(set(out))
