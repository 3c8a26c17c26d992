"""Frame-by-frame replay simulation.

Each frame runs in two phases so information can never travel faster than
one frame per hop: first every vehicle senses and fuses (own detections plus
messages sent the previous frame), then connected vehicles emit the messages
delivered next frame. Risk is evaluated for every vehicle against every VRU
it currently has in its environment model, using the model's (possibly
stale) VRU state. Everything is deterministic given (recording, rate, seed,
config).
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

from .dataset import Recording, planned_path
from .geometry import build_corridor
from .risk import PairTracker, RiskEvent, RiskParams, evaluate_pair, ear, risk_factor
from .sensing import SensorConfig, sense
from .v2x import DEFAULT_EXPIRY_FRAMES, LocalEnvModel, assign_cavs, deliver, fuse, generate_messages

DEFAULT_RATES = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class SimConfig:
    """Everything that parameterizes a run besides the recording itself."""

    penetration_rates: tuple = DEFAULT_RATES
    seeds: tuple = (0,)
    risk: RiskParams = field(default_factory=RiskParams)
    sensor: SensorConfig = field(default_factory=SensorConfig)
    lem_expiry: int = DEFAULT_EXPIRY_FRAMES
    relay_full_lem: bool = True
    sensing_enabled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "penetration_rates", tuple(float(r) for r in self.penetration_rates))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        for rate in self.penetration_rates:
            if not (0.0 <= rate <= 1.0):
                raise ValueError(f"penetration rate {rate} outside [0, 1]")
        if self.lem_expiry < 0:
            raise ValueError("lem_expiry must be non-negative")

    def to_dict(self) -> dict:
        return {
            "penetration_rates": list(self.penetration_rates),
            "seeds": list(self.seeds),
            "risk": asdict(self.risk),
            "sensor": asdict(self.sensor),
            "lem_expiry": self.lem_expiry,
            "relay_full_lem": self.relay_full_lem,
            "sensing_enabled": self.sensing_enabled,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {
            "penetration_rates",
            "seeds",
            "risk",
            "sensor",
            "lem_expiry",
            "relay_full_lem",
            "sensing_enabled",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "risk" in kwargs:
            kwargs["risk"] = RiskParams(**kwargs["risk"])
        if "sensor" in kwargs:
            kwargs["sensor"] = SensorConfig(**kwargs["sensor"])
        if "penetration_rates" in kwargs:
            kwargs["penetration_rates"] = tuple(kwargs["penetration_rates"])
        if "seeds" in kwargs:
            kwargs["seeds"] = tuple(kwargs["seeds"])
        return cls(**kwargs)

    def content_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:12]


@dataclass(frozen=True)
class EarSample:
    frame: int
    ego_id: int
    value: float


@dataclass(frozen=True)
class RunResult:
    """Outcome of one (recording, rate, seed) run."""

    events: tuple
    ear_samples: tuple
    meta: dict

    def to_dict(self) -> dict:
        return {
            "meta": dict(self.meta),
            "events": [
                [
                    e.frame,
                    e.ego_id,
                    e.vru_id,
                    e.ego_position[0],
                    e.ego_position[1],
                    e.vru_position[0],
                    e.vru_position[1],
                    e.risk_time,
                    e.risk_factor,
                ]
                for e in self.events
            ],
            "ear_samples": [[s.frame, s.ego_id, s.value] for s in self.ear_samples],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunResult":
        meta = dict(data["meta"])
        events = tuple(
            RiskEvent(
                int(row[0]),
                int(row[1]),
                int(row[2]),
                (row[3], row[4]),
                (row[5], row[6]),
                row[7],
                row[8],
                meta["rate"],
                meta["recording_id"],
                meta["location_id"],
            )
            for row in data["events"]
        )
        samples = tuple(EarSample(int(r[0]), int(r[1]), float(r[2])) for r in data["ear_samples"])
        return cls(events, samples, meta)


def run(recording: Recording, rate: float, seed: int, config: SimConfig) -> RunResult:
    """Simulate one recording at one penetration rate."""
    params = config.risk
    assignment = assign_cavs(recording.vehicle_metas(), rate, seed)
    cav_ids = assignment.cav_ids

    lems: dict[int, LocalEnvModel] = {}
    tracker = PairTracker(params.episode_reset_frames)
    events: list[RiskEvent] = []
    ear_samples: list[EarSample] = []
    outbox: list = []
    rf_infinite = risk_factor(params.rt_infinity, params)

    for frame in range(recording.frame_count):
        agents = recording.agents_at(frame)
        vehicles = [(m, s) for m, s in agents if m.agent_class.is_vehicle]
        vrus = [(m, s) for m, s in agents if m.agent_class.is_vru]

        detections = {}
        for meta, state in vehicles:
            if config.sensing_enabled:
                detections[meta.agent_id] = sense(meta, state, agents, config.sensor, frame)
            else:
                detections[meta.agent_id] = []

        present_cavs = [m.agent_id for m, _ in vehicles if m.agent_id in cav_ids]
        inboxes = deliver(outbox, present_cavs)

        for meta, _ in vehicles:
            lem = lems.get(meta.agent_id, LocalEnvModel(meta.agent_id, {}))
            lems[meta.agent_id] = fuse(
                lem,
                detections[meta.agent_id],
                inboxes.get(meta.agent_id, ()),
                frame,
                config.lem_expiry,
            )

        outbox = []
        for meta, state in vehicles:
            if meta.agent_id in cav_ids:
                cam, cpm = generate_messages(
                    meta.agent_id, lems[meta.agent_id], state, frame, config.relay_full_lem
                )
                outbox.append(cam)
                outbox.append(cpm)

        vru_positions = [(m.agent_id, s.position) for m, s in vrus]
        for meta, state in vehicles:
            value = ear(lems[meta.agent_id], vru_positions, state.position, params.ear_radius)
            if value is not None:
                ear_samples.append(EarSample(frame, meta.agent_id, value))

        for meta, state in vehicles:
            if not vrus:
                break
            lem = lems[meta.agent_id]
            moving = state.speed > params.v_stationary
            corridor = None
            path = None
            for vmeta, _ in vrus:
                entry = lem.entries.get(vmeta.agent_id)
                perceived = entry is not None
                rt = params.rt_infinity
                rf = rf_infinite
                vru_pos = None
                if perceived:
                    vru_pos = entry.state.position
                    if moving:
                        if corridor is None:
                            path = planned_path(recording, meta.agent_id, frame, params.horizon)
                            corridor = build_corridor(
                                path, meta.width, vehicle_length=meta.length, heading=state.heading
                            )
                        evaluation = evaluate_pair(
                            meta, state, path, vmeta, entry.state, params, corridor=corridor
                        )
                        rt = evaluation.risk_time
                        rf = evaluation.risk_factor
                event = tracker.update(
                    meta.agent_id,
                    vmeta.agent_id,
                    frame,
                    perceived,
                    rt,
                    rf,
                    params.rt_infinity,
                    state.position,
                    vru_pos,
                    rate,
                    recording.recording_id,
                    recording.location_id,
                )
                if event is not None:
                    events.append(event)

    meta = {
        "recording_id": recording.recording_id,
        "location_id": recording.location_id,
        "frame_rate": recording.frame_rate,
        "frame_count": recording.frame_count,
        "duration_s": recording.frame_count / recording.frame_rate if recording.frame_rate else 0.0,
        "vehicle_count": len(recording.vehicle_metas()),
        "vru_count": len(recording.vru_metas()),
        "rate": rate,
        "seed": seed,
        "config_hash": config.content_hash(),
    }
    return RunResult(tuple(events), tuple(ear_samples), meta)


@dataclass(frozen=True)
class SweepFailure:
    recording_id: int
    rate: float
    seed: int
    error: str


def sweep(
    recordings, config: SimConfig, workers: int = 1
) -> tuple[list[RunResult], list[SweepFailure]]:
    """Run the full (recording, rate, seed) grid.

    Individual run failures are collected rather than raised, so one corrupt
    recording cannot take down a sweep. Results come back in grid order
    regardless of ``workers``.
    """
    jobs = [
        (recording, rate, seed)
        for recording in recordings
        for rate in config.penetration_rates
        for seed in config.seeds
    ]

    def _one(job):
        recording, rate, seed = job
        try:
            return run(recording, rate, seed, config), None
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            return None, SweepFailure(
                getattr(recording, "recording_id", -1), rate, seed, f"{type(exc).__name__}: {exc}"
            )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_one, jobs))
    else:
        outcomes = [_one(job) for job in jobs]

    results = [r for r, _ in outcomes if r is not None]
    failures = [f for _, f in outcomes if f is not None]
    return results, failures


def with_rates(config: SimConfig, rates, seeds) -> SimConfig:
    """Copy a config with overridden sweep axes."""
    return replace(config, penetration_rates=tuple(rates), seeds=tuple(seeds))
