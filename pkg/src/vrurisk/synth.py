"""Built-in synthetic scenes for tests and demos.

Scenes are constructed directly as Recording objects (and can be written to
the standard CSV layout). They use the same conventions as recorded data:
25 Hz, meters, agents with contiguous lifespans.
"""

from __future__ import annotations

import math
import random

import numpy as np

from .dataset import AgentClass, AgentMeta, AgentTrack, Recording

FRAME_RATE = 25.0


def _track(
    agent_id: int,
    agent_class: AgentClass,
    length: float,
    width: float,
    initial_frame: int,
    xs,
    ys,
    vxs,
    vys,
    headings=None,
) -> AgentTrack:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    vxs = np.asarray(vxs, dtype=np.float64)
    vys = np.asarray(vys, dtype=np.float64)
    speed = np.hypot(vxs, vys)
    if headings is None:
        headings = np.where(speed > 1e-12, np.arctan2(vys, vxs), 0.0)
    headings = np.asarray(headings, dtype=np.float64) % (2.0 * math.pi)
    meta = AgentMeta(agent_id, agent_class, length, width, initial_frame, initial_frame + len(xs) - 1)
    return AgentTrack(meta, np.stack([xs, ys], axis=1), np.stack([vxs, vys], axis=1), speed, headings)


def _straight(
    agent_id: int,
    agent_class: AgentClass,
    length: float,
    width: float,
    start_xy,
    velocity,
    frames: int,
    initial_frame: int = 0,
    heading: float | None = None,
) -> AgentTrack:
    """Constant-velocity track (velocity may be zero for parked agents)."""
    t = np.arange(frames) / FRAME_RATE
    vx, vy = velocity
    xs = start_xy[0] + vx * t
    ys = start_xy[1] + vy * t
    vxs = np.full(frames, vx)
    vys = np.full(frames, vy)
    headings = None if heading is None else np.full(frames, heading)
    return _track(agent_id, agent_class, length, width, initial_frame, xs, ys, vxs, vys, headings)


def _recording(recording_id: int, location_id: int, tracks) -> Recording:
    agents = {t.meta.agent_id: t for t in tracks}
    frame_count = max(t.meta.final_frame for t in tracks) + 1
    return Recording(recording_id, location_id, FRAME_RATE, frame_count, agents)


def crossing_scene(seed: int = 0) -> Recording:
    """One vehicle, one pedestrian crossing its path with clear sight lines."""
    del seed  # fixed layout; kept for a uniform builder signature
    frames = 250
    car = _straight(1, AgentClass.CAR, 4.5, 2.0, (-40.0, 0.0), (8.0, 0.0), frames)
    ped = _straight(2, AgentClass.PEDESTRIAN, 0.5, 0.5, (10.0, -8.0), (0.0, 1.0), frames)
    return _recording(91, 90, [car, ped])


def occlusion_scene(seed: int = 0) -> Recording:
    """A pedestrian screened from the approaching vehicle by a parked truck.

    A helper vehicle parked clear of the truck keeps an unobstructed view, so
    collective perception reveals the pedestrian long before the ego's own
    sensor can.
    """
    del seed
    frames = 250
    ego = _straight(1, AgentClass.CAR, 4.5, 2.0, (-60.0, 0.0), (10.0, 0.0), frames)
    truck = _straight(2, AgentClass.TRUCK_BUS, 9.0, 3.0, (-13.5, 3.4), (0.0, 0.0), frames, heading=0.0)
    helper = _straight(3, AgentClass.CAR, 4.5, 2.0, (-8.6, 12.0), (0.0, 0.0), frames, heading=math.pi)
    ped = _straight(4, AgentClass.PEDESTRIAN, 0.5, 0.5, (-8.5, 4.55), (0.0, -1.0), frames)
    return _recording(92, 90, [ego, truck, helper, ped])


def multi_scene(seed: int = 0, n_moving: int = 4, n_vrus: int = 3, duration_s: float = 8.0) -> Recording:
    """Randomized intersection scene: through traffic, parked occluders,
    and VRUs crossing the horizontal road."""
    rng = random.Random(seed)
    frames = int(duration_s * FRAME_RATE)
    tracks = []
    aid = 1

    lanes = [(-1.75, 1), (1.75, -1)]
    for i in range(n_moving):
        lane_y, direction = lanes[i % 2]
        speed = rng.uniform(6.0, 11.0)
        start_x = -direction * rng.uniform(35.0, 55.0)
        tracks.append(
            _straight(
                aid,
                AgentClass.CAR,
                rng.uniform(4.0, 5.0),
                rng.uniform(1.8, 2.1),
                (start_x, lane_y),
                (direction * speed, 0.0),
                frames,
            )
        )
        aid += 1

    for _ in range(2):
        side = rng.choice((-1, 1))
        tracks.append(
            _straight(
                aid,
                AgentClass.CAR,
                4.5,
                1.8,
                (rng.uniform(-22.0, 22.0), side * rng.uniform(3.4, 4.2)),
                (0.0, 0.0),
                frames,
                heading=0.0,
            )
        )
        aid += 1

    for _ in range(n_vrus):
        if rng.random() < 0.7:
            side = rng.choice((-1, 1))
            x = rng.uniform(-18.0, 18.0)
            y0 = side * rng.uniform(5.0, 8.0)
            speed = rng.uniform(0.8, 1.6)
            tracks.append(
                _straight(
                    aid,
                    AgentClass.PEDESTRIAN,
                    0.5,
                    0.5,
                    (x, y0),
                    (0.0, -side * speed),
                    frames,
                )
            )
        else:
            direction = rng.choice((-1, 1))
            speed = rng.uniform(3.0, 5.5)
            tracks.append(
                _straight(
                    aid,
                    AgentClass.BICYCLE,
                    2.0,
                    0.7,
                    (-direction * rng.uniform(20.0, 40.0), 3.0 * direction),
                    (direction * speed, 0.0),
                    frames,
                )
            )
        aid += 1

    return _recording(93, 90, tracks)


SCENARIOS = {
    "crossing": crossing_scene,
    "occlusion": occlusion_scene,
    "multi": multi_scene,
}


def build(name: str, seed: int = 0) -> Recording:
    """Construct a named synthetic scene."""
    try:
        builder = SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario '{name}' (choose from {sorted(SCENARIOS)})") from None
    return builder(seed=seed)
