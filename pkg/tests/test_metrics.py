"""Metrics: message-loss percentage, topic filtering, aggregate folds."""

import pytest

from beaconcast.codec import Message
from beaconcast.engine import run
from beaconcast.errors import UndefinedMetricError
from beaconcast.metrics import fold_aggregate, message_loss_pct, topic_filter
from beaconcast.mobility import Road, TrafficKind, TrafficModel, Vehicle
from beaconcast.scenario_io import parse_scenario

from scenario_factory import make_ap, make_scenario


def reference_doc(count=200, loss=0.05, size=16384, speeds=(60.0, 70.0), seed=42):
    """90 m / 10 ms / 60-70 km/h reference setup, parameterized."""
    return {
        "schema_version": 1,
        "seed": seed,
        "duration_s": 560.0,
        "reassembly_policy": "accumulate",
        "road": {"polyline": [[0, 0], [2000, 0]]},
        "traffic": {
            "kind": "uniform_flow",
            "count": count,
            "headway_s": 2.0,
            "speed_kmh_min": speeds[0],
            "speed_kmh_max": speeds[1],
        },
        "aps": [
            {
                "position": [1000, 0],
                "ssid": "ad-net",
                "schedule": {"interval_ms": 10, "start_s": 0.0, "end_s": 560.0},
                "channel": {"range_m": 90.0, "loss_p": loss},
                "message": {"size_bytes": size},
            }
        ],
    }


def reference_loss(**kw):
    result = run(parse_scenario(reference_doc(**kw)))
    return message_loss_pct(result, "ad-net")


class TestMessageLossPct:
    def test_all_complete_is_zero(self):
        result = run(make_scenario([make_ap()]))
        assert message_loss_pct(result, "ad-net") == 0.0

    def test_total_loss_is_hundred(self):
        result = run(make_scenario([make_ap(loss_p=1.0)]))
        assert message_loss_pct(result, "ad-net") == 100.0

    def test_no_coverage_is_undefined(self):
        result = run(make_scenario([make_ap(position=(500.0, 500.0))]))
        with pytest.raises(UndefinedMetricError):
            message_loss_pct(result, "ad-net")

    def test_unknown_network_is_undefined(self):
        result = run(make_scenario([make_ap()]))
        with pytest.raises(UndefinedMetricError):
            message_loss_pct(result, "no-such-net")

    def test_paper_reference_point_16kb_5pct(self):
        # 16 KB at 5% loss over 200 cars at 60-70 km/h: nobody misses it.
        assert reference_loss() == 0.0

    def test_loss_counts_partial_receivers(self):
        # 112 KB at 10%: most cars fail; the metric is per car entered.
        pct = reference_loss(size=114688, loss=0.10)
        assert 50.0 < pct <= 100.0


class TestEmpiricalMonotonicity:
    def test_non_decreasing_in_message_size(self):
        sizes = [16384, 49152, 81920, 114688]
        losses = [reference_loss(size=s, loss=0.05) for s in sizes]
        assert losses == sorted(losses)

    def test_non_decreasing_in_loss_probability(self):
        a = reference_loss(size=81920, loss=0.05)
        b = reference_loss(size=81920, loss=0.10)
        assert b >= a

    def test_non_increasing_in_dwell_time(self):
        fast = reference_loss(size=114688, loss=0.05, speeds=(60.0, 70.0))
        slow = reference_loss(size=114688, loss=0.05, speeds=(40.0, 50.0))
        assert slow <= fast


class TestTopicFilter:
    MSG = Message.with_topic("restaurant", b"today's menu")

    def veh(self, *topics):
        return Vehicle(id=0, spawn_time_s=0.0, speed_mps=10.0,
                       subscribed_topics=frozenset(topics))

    def test_accept_all_when_unsubscribed(self):
        assert topic_filter(self.MSG, self.veh()) is True

    def test_rejects_other_topic(self):
        assert topic_filter(self.MSG, self.veh("fuel")) is False

    def test_accepts_matching_topic(self):
        assert topic_filter(self.MSG, self.veh("restaurant", "fuel")) is True


class TestAggregateFold:
    def test_aggregate_equals_fold_of_records(self):
        result = run(make_scenario([make_ap(loss_p=0.3, payload=b"p" * 3000)], seed=17))
        refolded = fold_aggregate(result.per_ap, result.per_vehicle)
        assert refolded == result.aggregate

    def test_fold_means(self):
        result = run(
            make_scenario(
                [make_ap(loss_p=0.5)],
                vehicles=[
                    Vehicle(id=0, spawn_time_s=0.0, speed_mps=20.0),
                    Vehicle(id=1, spawn_time_s=4.0, speed_mps=30.0),
                ],
            )
        )
        agg = result.aggregate
        n = len(result.per_vehicle)
        assert agg.frames_received_per_car == sum(
            v.frames_received for v in result.per_vehicle
        ) / n
        assert agg.total_frames_sent == result.per_ap[0].frames_sent
        assert agg.message_loss_pct["ad-net"] == message_loss_pct(result, "ad-net")
