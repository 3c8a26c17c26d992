"""Idealized 360-degree onboard perception with occlusion.

Every vehicle carries the same omnidirectional sensor. A target is detected
when enough of its outline is reachable by unobstructed rays from the ego
center: vehicles need more than half of their outline points visible, VRUs
need every point (their outline is only the four footprint corners, so a
single blocked corner hides them).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import AgentMeta, KinematicState
from .geometry import oriented_box
from .geometry import kernels


@dataclass(frozen=True)
class SensorConfig:
    max_range: float = 75.0
    outline_samples_vehicle: int = 16
    outline_samples_vru: int = 4
    vehicle_coverage_threshold: float = 0.5
    vru_coverage_threshold: float = 1.0
    vrus_occlude: bool = False

    def __post_init__(self):
        if self.max_range < 0:
            raise ValueError("max_range must be non-negative")
        if self.outline_samples_vehicle < 4 or self.outline_samples_vru < 4:
            raise ValueError("outline sampling needs at least the 4 corners")


@dataclass(frozen=True)
class Detection:
    """One perceived agent: its true state as observed at ``frame``."""

    agent_id: int
    observed_state: KinematicState
    frame: int


def outline_points(
    cx: float, cy: float, heading: float, length: float, width: float, n: int
) -> np.ndarray:
    """Sample ``n`` points on a box outline: the 4 corners plus interior
    edge points distributed proportionally to edge length."""
    c = math.cos(heading)
    s = math.sin(heading)
    hl = 0.5 * length
    hw = 0.5 * width
    corners = [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)]
    edges = [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    lengths = [math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in edges]
    perimeter = sum(lengths)

    extra = n - 4
    counts = [int(extra * l / perimeter) for l in lengths]
    remainders = [(extra * l / perimeter - counts[i], i) for i, l in enumerate(lengths)]
    for _, i in sorted(remainders, key=lambda r: (-r[0], r[1]))[: extra - sum(counts)]:
        counts[i] += 1

    local = []
    for (a, b), count in zip(edges, counts):
        local.append(a)
        for k in range(1, count + 1):
            t = k / (count + 1)
            local.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    pts = np.asarray(local, dtype=np.float64)
    out = np.empty_like(pts)
    out[:, 0] = cx + c * pts[:, 0] - s * pts[:, 1]
    out[:, 1] = cy + s * pts[:, 0] + c * pts[:, 1]
    return np.ascontiguousarray(out)


def sense(
    ego_meta: AgentMeta,
    ego_state: KinematicState,
    others: Sequence[tuple[AgentMeta, KinematicState]],
    config: SensorConfig,
    frame: int = 0,
) -> list[Detection]:
    """Detections made by one vehicle against all other agents in the scene.

    Rays run from the ego center to each target's outline points; any other
    vehicle footprint (and VRU footprints, if configured) occludes. The ego
    and the target never occlude themselves.
    """
    if not ego_meta.agent_class.is_vehicle:
        raise ValueError("sensing host must be a vehicle")

    boxes: dict[int, np.ndarray] = {}
    states: list[tuple[AgentMeta, KinematicState]] = []
    for meta, state in others:
        if meta.agent_id == ego_meta.agent_id:
            continue
        states.append((meta, state))
        if meta.agent_class.is_vehicle or config.vrus_occlude:
            boxes[meta.agent_id] = oriented_box(state, meta).vertices

    ox, oy = ego_state.position
    detections: list[Detection] = []
    for meta, state in sorted(states, key=lambda p: p[0].agent_id):
        is_vru = meta.agent_class.is_vru
        n = config.outline_samples_vru if is_vru else config.outline_samples_vehicle
        x, y = state.position
        pts = outline_points(x, y, state.heading, meta.length, meta.width, n)

        obstacle_ids = [aid for aid in boxes if aid not in (meta.agent_id, ego_meta.agent_id)]
        if obstacle_ids:
            stack = np.ascontiguousarray(np.stack([boxes[a] for a in sorted(obstacle_ids)]))
        else:
            stack = np.empty((0, 4, 2), dtype=np.float64)

        visible = kernels.count_visible(float(ox), float(oy), pts, stack, config.max_range)
        fraction = visible / n
        if is_vru:
            detected = fraction >= config.vru_coverage_threshold
        else:
            detected = fraction > config.vehicle_coverage_threshold
        if detected:
            detections.append(Detection(meta.agent_id, state, frame))
    return detections
