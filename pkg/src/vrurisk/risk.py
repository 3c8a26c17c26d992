"""Collision risk metric for vehicle/VRU pairs.

The pipeline per pair and frame: buffer the vehicle's replayed future path
into a corridor, intersect it with the VRU's reachable cone (or footprint
when standing), convert the overlap's distance extents into per-participant
time windows, and reduce to a single risk time (RT): the earliest instant
both participants can occupy the overlap simultaneously. RT maps to a risk
factor in (0, 1) through a logistic curve; small RT means imminent.

Distances convert to times assuming each participant keeps its current
speed; time windows open early by one body length because distances are
measured to the occupied region while bodies have extent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import AgentClass, AgentMeta, KinematicState, PlannedPath
from .geometry import (
    Corridor,
    DistanceWindow,
    build_cone,
    build_corridor,
    cone_polygons,
    corridor_distance_window,
    corridor_overlap,
    oriented_box,
    radial_distance_window,
)
from .v2x import LocalEnvModel


@dataclass(frozen=True)
class RiskParams:
    """Risk metric constants, all configurable.

    ``alpha`` (negative) and ``tau`` shape the logistic RT-to-RF mapping:
    RF(tau) = 0.5 and RF rises toward 1 as RT shrinks. ``horizon`` bounds
    both the corridor lookahead and the cone radius. Speeds below
    ``v_stationary`` count as standing.
    """

    alpha: float = -1.5
    tau: float = 2.5
    horizon: float = 5.0
    phi_pedestrian: float = math.pi / 6.0
    phi_bicycle: float = math.pi / 12.0
    v_stationary: float = 0.1
    rt_infinity: float = 1e6
    ear_radius: float = 25.0
    episode_reset_frames: int = 25
    av_time_mode: str = "constant_speed"

    def __post_init__(self):
        if self.alpha >= 0:
            raise ValueError("alpha must be negative (RF decreasing in RT)")
        if self.horizon <= 0 or self.rt_infinity <= 0 or self.ear_radius <= 0:
            raise ValueError("horizon, rt_infinity and ear_radius must be positive")
        if not (0 < self.phi_pedestrian <= math.pi / 2) or not (0 < self.phi_bicycle <= math.pi / 2):
            raise ValueError("cone half angles must lie in (0, pi/2]")
        if self.episode_reset_frames < 1:
            raise ValueError("episode_reset_frames must be at least 1")
        if self.av_time_mode not in ("constant_speed", "path_time"):
            raise ValueError("av_time_mode must be 'constant_speed' or 'path_time'")

    def phi_for(self, agent_class: AgentClass) -> float:
        if agent_class is AgentClass.PEDESTRIAN:
            return self.phi_pedestrian
        if agent_class is AgentClass.BICYCLE:
            return self.phi_bicycle
        raise ValueError(f"no reachability cone for class {agent_class.value}")


@dataclass(frozen=True)
class TimeWindow:
    """Closed interval of seconds during which a participant can occupy
    the overlap region."""

    t_min: float
    t_max: float

    def __post_init__(self):
        if not (0.0 <= self.t_min <= self.t_max):
            raise ValueError(f"invalid time window [{self.t_min}, {self.t_max}]")


def time_window(window: DistanceWindow, speed: float, participant_length: float) -> TimeWindow:
    """Convert a distance window to a time window at constant speed.

    Entry time is advanced by one body length (distances are measured to
    the far side of the body) and clamped at zero.
    """
    if speed <= 0.0:
        raise ValueError("constant-speed conversion needs positive speed")
    t_min = max(0.0, (window.d_min - participant_length) / speed)
    return TimeWindow(t_min, window.d_max / speed)


def _path_time_window(window: DistanceWindow, path: PlannedPath, length: float, speed: float) -> TimeWindow:
    """Convert using the replayed path's own arc/time profile.

    Arcs beyond the sampled path extrapolate at the current speed.
    """
    arcs = path.arcs
    times = path.times

    def _t(arc: float) -> float:
        if arcs[-1] <= 0:
            return 0.0
        if arc >= arcs[-1]:
            return float(times[-1]) + (arc - float(arcs[-1])) / speed
        return float(np.interp(arc, arcs, times))

    t_min = max(0.0, _t(window.d_min - length))
    t_max = max(t_min, _t(window.d_max))
    return TimeWindow(t_min, t_max)


def window_for_av(
    corridor: Corridor,
    overlap,
    av_speed: float,
    av_length: float,
    params: RiskParams,
    path: PlannedPath | None = None,
) -> TimeWindow | None:
    """When the vehicle occupies the overlap region, or None.

    A standing vehicle never reaches the overlap; its window is empty.
    """
    if av_speed <= params.v_stationary:
        return None
    window = corridor_distance_window(corridor, overlap)
    if window is None:
        return None
    if params.av_time_mode == "path_time" and path is not None:
        return _path_time_window(window, path, av_length, av_speed)
    return time_window(window, av_speed, av_length)


def window_for_vru(
    vru_state: KinematicState,
    vru_length: float,
    overlap,
    params: RiskParams,
) -> TimeWindow | None:
    """When the VRU can occupy the overlap region, or None.

    A standing VRU whose footprint already touches the corridor can be hit
    at any moment of the horizon; one clear of the corridor never can.
    """
    parts = [p for p in (overlap if isinstance(overlap, (list, tuple)) else [overlap]) if p is not None]
    if not parts:
        return None
    if vru_state.speed < params.v_stationary:
        return TimeWindow(0.0, params.horizon)
    window = radial_distance_window(vru_state.position, parts)
    return time_window(window, vru_state.speed, vru_length)


def risk_time(t_av: TimeWindow | None, t_vru: TimeWindow | None, params: RiskParams) -> float:
    """Earliest instant both windows are open; rt_infinity when they never are."""
    if t_av is None or t_vru is None:
        return params.rt_infinity
    lo = max(t_av.t_min, t_vru.t_min)
    hi = min(t_av.t_max, t_vru.t_max)
    if lo > hi:
        return params.rt_infinity
    return lo


def risk_factor(rt: float, params: RiskParams) -> float:
    """Logistic mapping of risk time to (0, 1); numerically stable for huge RT."""
    x = params.alpha * (rt - params.tau)
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@dataclass(frozen=True)
class PairEvaluation:
    t_av: TimeWindow | None
    t_vru: TimeWindow | None
    risk_time: float
    risk_factor: float


def evaluate_pair(
    ego_meta: AgentMeta,
    ego_state: KinematicState,
    path: PlannedPath,
    vru_meta: AgentMeta,
    vru_state: KinematicState,
    params: RiskParams,
    corridor: Corridor | None = None,
) -> PairEvaluation:
    """Full risk pipeline for one vehicle/VRU pair at one frame.

    ``vru_state`` is whatever the vehicle believes (typically its LEM entry,
    possibly a frame or two stale); ``ego_state`` and ``path`` are the
    vehicle's own. Pass ``corridor`` to reuse one corridor across the
    vehicle's pairs in a frame.
    """
    if ego_state.speed <= params.v_stationary:
        rt = params.rt_infinity
        return PairEvaluation(None, None, rt, risk_factor(rt, params))

    if corridor is None:
        corridor = build_corridor(
            path, ego_meta.width, vehicle_length=ego_meta.length, heading=ego_state.heading
        )

    if vru_state.speed < params.v_stationary:
        clip_regions = [oriented_box(vru_state, vru_meta).vertices]
    else:
        cone = build_cone(vru_state, params.phi_for(vru_meta.agent_class), params.horizon, params.v_stationary)
        clip_regions = cone_polygons(cone)

    overlap = corridor_overlap(corridor, clip_regions)
    t_av = window_for_av(corridor, overlap, ego_state.speed, ego_meta.length, params, path)
    t_vru = window_for_vru(vru_state, vru_meta.length, overlap, params)
    rt = risk_time(t_av, t_vru, params)
    return PairEvaluation(t_av, t_vru, rt, risk_factor(rt, params))


@dataclass(frozen=True)
class RiskEvent:
    """A recorded risk incidence: the first qualifying frame of an episode."""

    frame: int
    ego_id: int
    vru_id: int
    ego_position: tuple[float, float]
    vru_position: tuple[float, float]
    risk_time: float
    risk_factor: float
    penetration_rate: float
    recording_id: int
    location_id: int

    def __post_init__(self):
        if not (0.0 < self.risk_factor < 1.0):
            raise ValueError("recorded events must have RF strictly inside (0, 1)")


class SequencingError(ValueError):
    """Pair updates arrived out of frame order."""


@dataclass
class _PairState:
    recorded: bool = False
    gap: int = 0
    last_frame: int = -1


class PairTracker:
    """Deduplicates events: one per continuous risk episode per pair.

    A frame qualifies when the VRU is perceived and RT is finite. The first
    qualifying frame of an episode emits an event; the episode ends (and the
    pair re-arms) once ``reset_frames`` consecutive frames fail to qualify.
    """

    def __init__(self, reset_frames: int = 25):
        if reset_frames < 1:
            raise ValueError("reset_frames must be at least 1")
        self.reset_frames = reset_frames
        self._pairs: dict[tuple[int, int], _PairState] = {}

    def update(
        self,
        ego_id: int,
        vru_id: int,
        frame: int,
        perceived: bool,
        rt: float,
        rf: float,
        rt_infinity: float,
        ego_position: tuple[float, float],
        vru_position: tuple[float, float] | None,
        penetration_rate: float,
        recording_id: int,
        location_id: int,
    ) -> RiskEvent | None:
        state = self._pairs.setdefault((ego_id, vru_id), _PairState())
        if frame <= state.last_frame:
            raise SequencingError(
                f"pair ({ego_id}, {vru_id}): frame {frame} after frame {state.last_frame}"
            )
        state.last_frame = frame

        qualifying = perceived and rt < rt_infinity
        if qualifying:
            state.gap = 0
            if not state.recorded:
                state.recorded = True
                return RiskEvent(
                    frame,
                    ego_id,
                    vru_id,
                    ego_position,
                    vru_position if vru_position is not None else ego_position,
                    rt,
                    rf,
                    penetration_rate,
                    recording_id,
                    location_id,
                )
            return None
        state.gap += 1
        if state.gap >= self.reset_frames:
            state.recorded = False
        return None


def ear(
    lem: LocalEnvModel,
    vru_positions,
    ego_position: tuple[float, float],
    radius: float,
) -> float | None:
    """Environmental awareness ratio: known nearby VRUs over all nearby VRUs.

    ``vru_positions`` holds (vru_id, ground-truth position) pairs for the
    frame. Returns None when no VRU is within ``radius`` (nothing to know).
    """
    ex, ey = ego_position
    nearby = [
        vid
        for vid, (x, y) in vru_positions
        if math.hypot(x - ex, y - ey) <= radius
    ]
    if not nearby:
        return None
    known = sum(1 for vid in nearby if vid in lem.entries)
    return known / len(nearby)
