"""Motion and traffic tests; dwell windows checked against a 1 ms scan."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beaconcast.channel import in_range
from beaconcast.mobility import (
    Road,
    TrafficKind,
    TrafficModel,
    Vehicle,
    coverage_intervals,
    despawn_time,
    dwell_interval,
    generate_vehicles,
    position_at,
)

STRAIGHT = Road(polyline=((0.0, 0.0), (1000.0, 0.0)))


def vehicle(spawn=0.0, speed=25.0, vid=0):
    return Vehicle(id=vid, spawn_time_s=spawn, speed_mps=speed)


class TestPosition:
    def test_constant_speed_interpolation(self):
        assert position_at(vehicle(), 10.0, STRAIGHT) == (250.0, 0.0)

    def test_before_spawn_off_road(self):
        assert position_at(vehicle(spawn=5.0), 4.9, STRAIGHT) is None

    def test_past_end_off_road(self):
        assert position_at(vehicle(), 40.1, STRAIGHT) is None

    def test_road_end_still_on_road(self):
        assert position_at(vehicle(), 40.0, STRAIGHT) == (1000.0, 0.0)

    def test_polyline_corner(self):
        road = Road(polyline=((0.0, 0.0), (100.0, 0.0), (100.0, 100.0)))
        assert road.length_m == 200.0
        assert position_at(vehicle(speed=10.0), 15.0, road) == (100.0, 50.0)

    def test_translation_consistency(self):
        v = vehicle(speed=20.0)
        for t in (1.0, 5.0, 17.5):
            p0 = position_at(v, t, STRAIGHT)
            p1 = position_at(v, t + 2.0, STRAIGHT)
            assert p1[0] - p0[0] == pytest.approx(40.0)

    def test_road_validation(self):
        with pytest.raises(ValueError):
            Road(polyline=((0.0, 0.0),))
        with pytest.raises(ValueError):
            Road(polyline=((0.0, 0.0), (0.0, 0.0)))


class TestDwell:
    def test_symmetric_pass(self):
        iv = dwell_interval(vehicle(), (500.0, 0.0), 90.0, STRAIGHT)
        assert iv == (pytest.approx(16.4), pytest.approx(23.6))

    def test_disk_never_reached(self):
        assert dwell_interval(vehicle(), (500.0, 200.0), 90.0, STRAIGHT) is None

    def test_paper_traversal_width_at_70kmh(self):
        speed = 70.0 / 3.6
        iv = dwell_interval(vehicle(speed=speed), (500.0, 0.0), 90.0, STRAIGHT)
        width = iv[1] - iv[0]
        assert width == pytest.approx(2 * 90.0 / speed)  # ~9.26 s
        assert width / 2 == pytest.approx(4.63, abs=0.005)  # approach time

    def test_offset_ap_shorter_dwell(self):
        # Chord through a disk of radius 90 at lateral offset 54: half-chord 72.
        iv = dwell_interval(vehicle(), (500.0, 54.0), 90.0, STRAIGHT)
        assert iv[0] == pytest.approx((500.0 - 72.0) / 25.0)
        assert iv[1] == pytest.approx((500.0 + 72.0) / 25.0)

    def test_vehicle_spawning_inside_disk(self):
        iv = dwell_interval(vehicle(), (50.0, 0.0), 90.0, STRAIGHT)
        assert iv[0] == 0.0
        assert iv[1] == pytest.approx(140.0 / 25.0)

    @settings(max_examples=60, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_matches_brute_force_scan_within_1ms(self, rng):
        road = Road(polyline=((0.0, 0.0), (rng.uniform(200.0, 1500.0), 0.0)))
        v = vehicle(spawn=rng.uniform(0.0, 5.0), speed=rng.uniform(5.0, 40.0))
        ap = (rng.uniform(0.0, road.length_m), rng.uniform(-80.0, 80.0))
        range_m = rng.uniform(30.0, 120.0)
        iv = dwell_interval(v, ap, range_m, road)
        end = despawn_time(v, road)
        scan = [
            t / 1000.0
            for t in range(0, int(end * 1000) + 1)
            if (p := position_at(v, t / 1000.0, road)) is not None
            and in_range(ap, p, range_m)
        ]
        tol = 0.001 + 1e-9  # scan resolution plus float slop at the grid points
        if iv is None:
            assert not scan
        elif not scan:
            # Window narrower than the scan step.
            assert iv[1] - iv[0] <= tol
        else:
            assert abs(iv[0] - scan[0]) <= tol
            assert abs(iv[1] - scan[-1]) <= tol

    def test_exact_tangency_is_a_degenerate_touch(self):
        # Closest approach exactly equal to the radius: the contact instant
        # must not be lost to float rounding in the quadratic.
        iv = dwell_interval(vehicle(speed=30.0), (30.0, -80.0), 80.0, STRAIGHT)
        assert iv is not None
        assert iv[0] == pytest.approx(1.0, abs=1e-6)
        assert iv[1] - iv[0] <= 1e-6

    def test_polyline_reentry_gives_two_intervals(self):
        # Road dips out of range and comes back: two coverage windows.
        road = Road(
            polyline=((0.0, 0.0), (200.0, 0.0), (200.0, 300.0), (400.0, 300.0), (400.0, 0.0), (600.0, 0.0))
        )
        ivs = coverage_intervals(vehicle(speed=10.0), (300.0, 0.0), 120.0, road)
        assert len(ivs) == 2


class TestTraffic:
    def test_uniform_flow_spawns(self):
        model = TrafficModel(kind=TrafficKind.UNIFORM_FLOW, count=3, headway_s=5.0)
        vs = generate_vehicles(model, random.Random(1))
        assert [v.spawn_time_s for v in vs] == [0.0, 5.0, 10.0]
        assert [v.id for v in vs] == [0, 1, 2]

    def test_degenerate_speed_band(self):
        model = TrafficModel(
            kind=TrafficKind.UNIFORM_FLOW, count=5, speed_kmh_min=50.0, speed_kmh_max=50.0
        )
        vs = generate_vehicles(model, random.Random(1))
        assert all(v.speed_mps == pytest.approx(50.0 / 3.6) for v in vs)

    def test_poisson_mean_interarrival(self):
        model = TrafficModel(kind=TrafficKind.POISSON, count=1000, rate_per_s=0.2)
        vs = generate_vehicles(model, random.Random(42))
        gaps = [b.spawn_time_s - a.spawn_time_s for a, b in zip(vs, vs[1:])]
        assert abs(sum(gaps) / len(gaps) - 5.0) <= 0.5

    def test_explicit_passthrough(self):
        v = vehicle(vid=7)
        model = TrafficModel(kind=TrafficKind.EXPLICIT, vehicles=(v,))
        assert generate_vehicles(model, random.Random(0)) == [v]

    def test_deterministic_given_seed(self):
        model = TrafficModel(kind=TrafficKind.POISSON, count=50, rate_per_s=1.0)
        a = generate_vehicles(model, random.Random(9))
        b = generate_vehicles(model, random.Random(9))
        assert a == b

    def test_speed_band_validation(self):
        with pytest.raises(ValueError):
            TrafficModel(kind=TrafficKind.UNIFORM_FLOW, count=1, speed_kmh_min=70, speed_kmh_max=60)
        with pytest.raises(ValueError):
            TrafficModel(kind=TrafficKind.UNIFORM_FLOW, count=0)
        with pytest.raises(ValueError):
            TrafficModel(kind=TrafficKind.EXPLICIT)
