"""Frame-synchronous V2X message exchange and environment-model fusion.

Connected vehicles broadcast two messages per frame: an awareness message
carrying their own state and a perception message relaying their local
environment model (LEM). Messages sent at frame n reach every other
connected vehicle at frame n+1, exactly one frame later. Each vehicle,
connected or not, maintains a LEM from its own detections; connected
vehicles additionally fuse received messages into theirs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .dataset import AgentMeta, KinematicState
from .sensing import Detection

SOURCE_SENSED = "sensed"
SOURCE_V2X = "v2x"

DEFAULT_EXPIRY_FRAMES = 12


@dataclass(frozen=True)
class PenetrationAssignment:
    """Which vehicles are connected at a given market penetration rate."""

    rate: float
    seed: int
    cav_ids: frozenset

    def __post_init__(self):
        if not (0.0 <= self.rate <= 1.0):
            raise ValueError("penetration rate must lie in [0, 1]")


@dataclass(frozen=True)
class CamMessage:
    """Cooperative awareness: the sender's own state."""

    sender_id: int
    sender_state: KinematicState
    sent_frame: int


@dataclass(frozen=True)
class CpmMessage:
    """Collective perception: entries relayed from the sender's LEM.

    ``perceived`` holds (agent_id, state, last_observed_frame) tuples with
    the original observation frames, so receivers can judge freshness.
    """

    sender_id: int
    sent_frame: int
    perceived: tuple


@dataclass(frozen=True)
class LemEntry:
    state: KinematicState
    source: str
    last_update_frame: int


@dataclass(frozen=True)
class LocalEnvModel:
    """One vehicle's working picture of its surroundings."""

    owner_id: int
    entries: Mapping[int, LemEntry] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))

    def known_ids(self) -> list[int]:
        return sorted(self.entries)


def assign_cavs(vehicles: Sequence[AgentMeta], rate: float, seed: int) -> PenetrationAssignment:
    """Deterministic connected-vehicle sample.

    Vehicle ids are sorted, shuffled with the seed, and the first
    round(rate * N) taken, so assignments for the same seed nest across
    rates: every vehicle connected at rate r stays connected at r' > r.
    """
    if not (0.0 <= rate <= 1.0):
        raise ValueError("penetration rate must lie in [0, 1]")
    ids = sorted({m.agent_id for m in vehicles})
    k = int(math.floor(rate * len(ids) + 0.5))
    rng = random.Random(seed)
    rng.shuffle(ids)
    return PenetrationAssignment(rate, seed, frozenset(ids[:k]))


def generate_messages(
    sender_id: int,
    lem: LocalEnvModel,
    state: KinematicState,
    frame: int,
    relay_full_lem: bool = True,
) -> tuple[CamMessage, CpmMessage]:
    """Messages a connected vehicle emits at ``frame``.

    The perception message relays the sender's current LEM with original
    observation frames; with ``relay_full_lem`` off only entries the sender
    observed itself are included (no multi-hop forwarding).
    """
    perceived = []
    for aid in sorted(lem.entries):
        entry = lem.entries[aid]
        if not relay_full_lem and entry.source != SOURCE_SENSED:
            continue
        perceived.append((aid, entry.state, entry.last_update_frame))
    return (
        CamMessage(sender_id, state, frame),
        CpmMessage(sender_id, frame, tuple(perceived)),
    )


def deliver(outbox: Sequence, recipients: Iterable[int]) -> dict[int, list]:
    """Broadcast delivery: every recipient gets every message except its own.

    The sim calls this with the previous frame's outbox, which realizes the
    one-frame latency.
    """
    inboxes: dict[int, list] = {rid: [] for rid in sorted(recipients)}
    for msg in outbox:
        for rid in inboxes:
            if rid != msg.sender_id:
                inboxes[rid].append(msg)
    return inboxes


def fuse(
    lem: LocalEnvModel,
    detections: Sequence[Detection],
    inbox: Sequence,
    frame: int,
    expiry_frames: int = DEFAULT_EXPIRY_FRAMES,
) -> LocalEnvModel:
    """Next LEM state for one vehicle.

    Received entries replace existing ones only when strictly fresher (ties
    keep what is already known, which favors sensed entries over relayed
    ones). Own detections always win: they carry the current frame. Entries
    older than ``expiry_frames`` are dropped, and the owner never appears in
    its own model.
    """
    entries = dict(lem.entries)

    def _order(msg):
        return (msg.sender_id, 0 if isinstance(msg, CamMessage) else 1, msg.sent_frame)

    for msg in sorted(inbox, key=_order):
        if isinstance(msg, CamMessage):
            candidates = [(msg.sender_id, msg.sender_state, msg.sent_frame)]
        else:
            candidates = list(msg.perceived)
        for aid, state, observed in candidates:
            if aid == lem.owner_id:
                continue
            current = entries.get(aid)
            if current is None or observed > current.last_update_frame:
                entries[aid] = LemEntry(state, SOURCE_V2X, observed)

    for det in detections:
        if det.agent_id == lem.owner_id:
            continue
        entries[det.agent_id] = LemEntry(det.observed_state, SOURCE_SENSED, frame)

    entries = {
        aid: e for aid, e in entries.items() if frame - e.last_update_frame <= expiry_frames
    }
    return LocalEnvModel(lem.owner_id, entries)
