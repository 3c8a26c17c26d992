"""Risk time, risk factor, time windows, episodes, and awareness ratio."""

import math

import numpy as np
import pytest

from oracle_utils import brute_force_rt
from vrurisk.dataset import AgentClass, AgentMeta, KinematicState, PlannedPath
from vrurisk.geometry import DistanceWindow
from vrurisk.risk import (
    PairTracker,
    RiskEvent,
    RiskParams,
    SequencingError,
    TimeWindow,
    ear,
    evaluate_pair,
    risk_factor,
    risk_time,
    time_window,
    window_for_vru,
)
from vrurisk.v2x import SOURCE_SENSED, LemEntry, LocalEnvModel

PARAMS = RiskParams()


def kstate(x, y, speed=0.0, heading=0.0):
    vel = (speed * math.cos(heading), speed * math.sin(heading))
    return KinematicState((x, y), speed, heading, vel)


def straight_path(x, y, heading, speed, horizon=5.0, fps=25.0):
    steps = int(math.floor(horizon * fps + 1e-9))
    times = np.arange(steps + 1, dtype=np.float64) / fps
    dx, dy = math.cos(heading), math.sin(heading)
    positions = np.column_stack([x + dx * speed * times, y + dy * speed * times])
    return PlannedPath(times, positions, speed * times)


def vehicle_meta(aid=1, length=4.0, width=2.0):
    return AgentMeta(aid, AgentClass.CAR, length, width, 0, 1000)


def ped_meta(aid=2):
    return AgentMeta(aid, AgentClass.PEDESTRIAN, 0.5, 0.5, 0, 1000)


def bike_meta(aid=3):
    return AgentMeta(aid, AgentClass.BICYCLE, 2.0, 0.7, 0, 1000)


class TestTimeWindow:
    def test_basic_conversion(self):
        win = time_window(DistanceWindow(9.75, 10.25), 5.0, 4.0)
        assert win.t_min == pytest.approx(1.15)
        assert win.t_max == pytest.approx(2.05)

    def test_entry_clamped_at_zero(self):
        win = time_window(DistanceWindow(2.0, 8.0), 2.0, 6.0)
        assert win.t_min == 0.0
        assert win.t_max == pytest.approx(4.0)

    def test_needs_positive_speed(self):
        with pytest.raises(ValueError):
            time_window(DistanceWindow(0.0, 1.0), 0.0, 1.0)

    def test_window_order_enforced(self):
        with pytest.raises(ValueError):
            TimeWindow(2.0, 1.0)


class TestRiskTime:
    def test_overlapping_windows(self):
        rt = risk_time(TimeWindow(1.0, 3.0), TimeWindow(2.0, 5.0), PARAMS)
        assert rt == pytest.approx(2.0)

    def test_av_later_participant(self):
        rt = risk_time(TimeWindow(2.5, 4.0), TimeWindow(0.0, 5.0), PARAMS)
        assert rt == pytest.approx(2.5)

    def test_disjoint_windows_infinite(self):
        rt = risk_time(TimeWindow(0.0, 1.0), TimeWindow(2.0, 3.0), PARAMS)
        assert rt == PARAMS.rt_infinity

    def test_touching_windows_finite(self):
        rt = risk_time(TimeWindow(0.0, 2.0), TimeWindow(2.0, 3.0), PARAMS)
        assert rt == pytest.approx(2.0)

    def test_missing_window_infinite(self):
        assert risk_time(None, TimeWindow(0.0, 1.0), PARAMS) == PARAMS.rt_infinity
        assert risk_time(TimeWindow(0.0, 1.0), None, PARAMS) == PARAMS.rt_infinity


class TestRiskFactor:
    def test_anchor_at_tau(self):
        assert risk_factor(2.5, PARAMS) == pytest.approx(0.5, abs=1e-12)

    def test_anchor_one_second(self):
        assert risk_factor(1.0, PARAMS) == pytest.approx(0.9047, abs=5e-5)

    def test_anchor_two_seconds(self):
        assert risk_factor(2.0, PARAMS) == pytest.approx(0.6792, abs=5e-5)

    def test_zero_rt_near_one(self):
        assert risk_factor(0.0, PARAMS) == pytest.approx(1.0 / (1.0 + math.exp(-3.75)))

    def test_infinite_rt_underflows_to_zero(self):
        rf = risk_factor(PARAMS.rt_infinity, PARAMS)
        assert 0.0 <= rf < 1e-6

    def test_strictly_decreasing(self):
        rts = np.linspace(0.0, 10.0, 200)
        rfs = [risk_factor(float(rt), PARAMS) for rt in rts]
        assert all(a > b for a, b in zip(rfs, rfs[1:]))


class TestEvaluatePair:
    def test_head_on_standing_ped(self):
        # vehicle at origin going +x at 5 m/s, standing pedestrian at (10, 0)
        ego = vehicle_meta()
        ped = ped_meta()
        path = straight_path(0.0, 0.0, 0.0, 5.0)
        out = evaluate_pair(ego, kstate(0, 0, 5.0), path, ped, kstate(10.0, 0.0), PARAMS)
        assert out.t_av.t_min == pytest.approx(1.15, abs=1e-9)
        assert out.t_av.t_max == pytest.approx(2.05, abs=1e-9)
        assert out.t_vru == TimeWindow(0.0, 5.0)
        assert out.risk_time == pytest.approx(1.15, abs=1e-9)
        assert out.risk_factor == pytest.approx(0.8834, abs=5e-5)

    def test_standing_ped_clear_of_corridor(self):
        ego = vehicle_meta()
        ped = ped_meta()
        path = straight_path(0.0, 0.0, 0.0, 5.0)
        out = evaluate_pair(ego, kstate(0, 0, 5.0), path, ped, kstate(10.0, 5.0), PARAMS)
        assert out.t_vru is None
        assert out.risk_time == PARAMS.rt_infinity

    def test_stationary_ego_infinite(self):
        ego = vehicle_meta()
        ped = ped_meta()
        path = straight_path(0.0, 0.0, 0.0, 0.05)
        out = evaluate_pair(ego, kstate(0, 0, 0.05), path, ped, kstate(2.0, 0.0), PARAMS)
        assert out.risk_time == PARAMS.rt_infinity
        assert out.t_av is None

    def test_crossing_ped_windows(self):
        # ped 10 m ahead, 3 m to the side, walking straight at the corridor
        ego = vehicle_meta()
        ped = ped_meta()
        path = straight_path(0.0, 0.0, 0.0, 5.0)
        out = evaluate_pair(
            ego,
            kstate(0, 0, 5.0),
            path,
            ped,
            kstate(10.0, 3.0, 1.0, -math.pi / 2.0),
            PARAMS,
        )
        # the ped needs (3-1-0.5)/1 = 1.5 s to reach the corridor minus
        # its own length; entry cannot be earlier, and here it binds
        assert out.t_vru.t_min == pytest.approx(1.5, abs=0.02)
        assert out.risk_time == pytest.approx(1.5, abs=0.02)

    def test_ped_cone_behind_vehicle(self):
        ego = vehicle_meta()
        ped = ped_meta()
        path = straight_path(0.0, 0.0, 0.0, 10.0)
        out = evaluate_pair(
            ego, kstate(0, 0, 10.0), path, ped, kstate(-8.0, 0.0, 1.2, math.pi), PARAMS
        )
        assert out.risk_time == PARAMS.rt_infinity

    def test_matches_brute_force_sample(self):
        rng = np.random.default_rng(97)
        agree = 0
        total = 0
        for _ in range(120):
            ego_speed = rng.uniform(2.0, 14.0)
            ego_heading = rng.uniform(0.0, 2.0 * math.pi)
            ego_len = rng.uniform(3.5, 5.5)
            ego_wid = rng.uniform(1.6, 2.2)
            ex, ey = rng.uniform(-15.0, 15.0, 2)
            if rng.uniform() < 0.5:
                vmeta = ped_meta()
                phi = PARAMS.phi_pedestrian
            else:
                vmeta = bike_meta()
                phi = PARAMS.phi_bicycle
            vru_speed = float(rng.choice([0.0, rng.uniform(0.3, 3.0)]))
            vru_heading = rng.uniform(0.0, 2.0 * math.pi)
            vx = ex + rng.uniform(-25.0, 25.0)
            vy = ey + rng.uniform(-25.0, 25.0)

            ego = AgentMeta(1, AgentClass.CAR, ego_len, ego_wid, 0, 1000)
            path = straight_path(ex, ey, ego_heading, ego_speed)
            got = evaluate_pair(
                ego,
                kstate(ex, ey, ego_speed, ego_heading),
                path,
                vmeta,
                kstate(vx, vy, vru_speed, vru_heading),
                PARAMS,
            ).risk_time
            ref = brute_force_rt(
                (ex, ey), ego_heading, ego_speed, ego_len, ego_wid,
                (vx, vy), vru_heading, vru_speed, vmeta.length, vmeta.width,
                phi,
            )
            total += 1
            if (got >= PARAMS.rt_infinity) == (ref >= PARAMS.rt_infinity) and (
                got >= PARAMS.rt_infinity or abs(got - ref) <= 0.1
            ):
                agree += 1
        assert agree / total >= 0.99


class TestWindowForVru:
    def test_standing_overlapping(self):
        region = np.asarray([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        win = window_for_vru(kstate(0.5, 0.5), 0.5, [region], PARAMS)
        assert win == TimeWindow(0.0, PARAMS.horizon)

    def test_no_overlap_none(self):
        assert window_for_vru(kstate(0.5, 0.5), 0.5, [], PARAMS) is None


class TestPairTracker:
    def make(self):
        return PairTracker(reset_frames=25)

    def feed(self, tracker, frame, qualifying, perceived=True):
        rt = 1.0 if qualifying else PARAMS.rt_infinity
        return tracker.update(
            1, 2, frame, perceived, rt, risk_factor(rt, PARAMS), PARAMS.rt_infinity,
            (0.0, 0.0), (5.0, 0.0), 0.5, 91, 90,
        )

    def test_one_event_per_episode(self):
        tracker = self.make()
        events = [self.feed(tracker, f, True) for f in range(100, 151)]
        fired = [e for e in events if e is not None]
        assert len(fired) == 1
        assert fired[0].frame == 100

    def test_event_waits_for_perception(self):
        tracker = self.make()
        events = []
        for f in range(100, 121):
            events.append(self.feed(tracker, f, True, perceived=False))
        for f in range(121, 140):
            events.append(self.feed(tracker, f, True, perceived=True))
        fired = [e for e in events if e is not None]
        assert len(fired) == 1
        assert fired[0].frame == 121

    def test_short_gap_does_not_rearm(self):
        tracker = self.make()
        fired = []
        for f in range(0, 20):
            fired.append(self.feed(tracker, f, True))
        for f in range(20, 30):  # 10-frame lull
            fired.append(self.feed(tracker, f, False))
        for f in range(30, 40):
            fired.append(self.feed(tracker, f, True))
        assert len([e for e in fired if e]) == 1

    def test_long_gap_rearms(self):
        tracker = self.make()
        fired = []
        for f in range(0, 10):
            fired.append(self.feed(tracker, f, True))
        for f in range(10, 35):  # 25-frame lull
            fired.append(self.feed(tracker, f, False))
        for f in range(35, 45):
            fired.append(self.feed(tracker, f, True))
        events = [e for e in fired if e]
        assert [e.frame for e in events] == [0, 35]

    def test_pairs_independent(self):
        tracker = self.make()
        e1 = tracker.update(1, 2, 0, True, 1.0, 0.9, PARAMS.rt_infinity, (0, 0), (1, 1), 0.0, 91, 90)
        e2 = tracker.update(1, 3, 0, True, 1.0, 0.9, PARAMS.rt_infinity, (0, 0), (2, 2), 0.0, 91, 90)
        assert e1 is not None and e2 is not None

    def test_out_of_order_frame_rejected(self):
        tracker = self.make()
        self.feed(tracker, 10, True)
        with pytest.raises(SequencingError):
            self.feed(tracker, 10, True)
        with pytest.raises(SequencingError):
            self.feed(tracker, 9, True)

    def test_event_validates_rf(self):
        with pytest.raises(ValueError):
            RiskEvent(0, 1, 2, (0, 0), (1, 1), 1.0, 0.0, 0.5, 91, 90)
        with pytest.raises(ValueError):
            RiskEvent(0, 1, 2, (0, 0), (1, 1), 1.0, 1.0, 0.5, 91, 90)


class TestEar:
    def lem_with(self, ids):
        return LocalEnvModel(
            1, {i: LemEntry(kstate(0.0, 0.0), SOURCE_SENSED, 0) for i in ids}
        )

    def test_full_awareness(self):
        vrus = [(2, (3.0, 0.0)), (3, (0.0, 4.0))]
        assert ear(self.lem_with([2, 3]), vrus, (0.0, 0.0), 25.0) == 1.0

    def test_partial_awareness(self):
        vrus = [(2, (3.0, 0.0)), (3, (0.0, 4.0))]
        assert ear(self.lem_with([2]), vrus, (0.0, 0.0), 25.0) == 0.5

    def test_no_nearby_vrus_skipped(self):
        vrus = [(2, (30.0, 0.0))]
        assert ear(self.lem_with([2]), vrus, (0.0, 0.0), 25.0) is None

    def test_radius_inclusive(self):
        vrus = [(2, (25.0, 0.0))]
        assert ear(self.lem_with([]), vrus, (0.0, 0.0), 25.0) == 0.0
        assert ear(self.lem_with([2]), vrus, (0.0, 0.0), 25.0) == 1.0

    def test_lem_entry_outside_radius_not_counted(self):
        # knowing about a distant VRU neither helps nor hurts
        vrus = [(2, (3.0, 0.0)), (3, (40.0, 0.0))]
        assert ear(self.lem_with([3]), vrus, (0.0, 0.0), 25.0) == 0.0
