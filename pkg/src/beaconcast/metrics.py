"""Statistics catalog and the headline message-loss metric.

Per-transmitter, per-vehicle, and aggregate counters accumulated by a run,
plus the message-loss percentage: of all cars that entered a network's
coverage, the share that never assembled the complete message. A car that
completes on a later pass through coverage still counts as a success.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List

from .codec import Message
from .errors import UndefinedMetricError
from .mobility import Vehicle

if TYPE_CHECKING:
    from .engine import RunResult


@dataclass
class ApStats:
    """Per-transmitter counters plus the configuration echo."""

    index: int
    ssid: str
    bssid: str
    position: tuple[float, float]
    range_m: float
    interval_ms: int
    message_size_bytes: int
    fragment_count: int
    frames_sent: int = 0
    complete_loops: int = 0
    time_running_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "ssid": self.ssid,
            "bssid": self.bssid,
            "position": list(self.position),
            "range_m": self.range_m,
            "interval_ms": self.interval_ms,
            "message_size_bytes": self.message_size_bytes,
            "fragment_count": self.fragment_count,
            "frames_sent": self.frames_sent,
            "complete_loops": self.complete_loops,
            "time_running_s": self.time_running_s,
        }


@dataclass
class NetworkVehicleStats:
    """One vehicle's relationship with one network name."""

    entered_coverage: bool = False
    completed_messages: int = 0
    dropped_messages: int = 0

    def to_dict(self) -> dict:
        return {
            "entered_coverage": self.entered_coverage,
            "completed_messages": self.completed_messages,
            "dropped_messages": self.dropped_messages,
        }


@dataclass
class VehicleStats:
    """Per-vehicle counters.

    Conservation: frames_received + frames_lost equals frames offered while
    in range, and received frames split into stored_new + duplicates +
    discarded (discards occur only on strict-sequential resets and
    conflicting-total recoveries).
    """

    id: int
    spawn_time_s: float
    speed_mps: float
    completed_messages: int = 0
    dropped_messages: int = 0
    frames_received: int = 0
    duplicate_frames: int = 0
    frames_lost: int = 0
    frames_offered: int = 0
    frames_stored_new: int = 0
    frames_discarded: int = 0
    filtered_messages: int = 0
    per_network: Dict[str, NetworkVehicleStats] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "spawn_time_s": self.spawn_time_s,
            "speed_mps": self.speed_mps,
            "completed_messages": self.completed_messages,
            "dropped_messages": self.dropped_messages,
            "frames_received": self.frames_received,
            "duplicate_frames": self.duplicate_frames,
            "frames_lost": self.frames_lost,
            "frames_offered": self.frames_offered,
            "frames_stored_new": self.frames_stored_new,
            "frames_discarded": self.frames_discarded,
            "filtered_messages": self.filtered_messages,
            "per_network": {k: v.to_dict() for k, v in self.per_network.items()},
        }


@dataclass
class AggregateStats:
    total_frames_sent: int
    total_completed_messages: int
    frames_received_per_car: float
    frames_lost_per_car: float
    duplicate_frames_per_car: float
    vehicle_count: int
    message_loss_pct: Dict[str, float]

    def to_dict(self) -> dict:
        return {
            "total_frames_sent": self.total_frames_sent,
            "total_completed_messages": self.total_completed_messages,
            "frames_received_per_car": self.frames_received_per_car,
            "frames_lost_per_car": self.frames_lost_per_car,
            "duplicate_frames_per_car": self.duplicate_frames_per_car,
            "vehicle_count": self.vehicle_count,
            "message_loss_pct": dict(self.message_loss_pct),
        }


def fold_aggregate(per_ap: List[ApStats], per_vehicle: List[VehicleStats]) -> AggregateStats:
    """Aggregate as a pure fold of the per-AP and per-vehicle records."""
    n = len(per_vehicle)
    networks = sorted({net for v in per_vehicle for net in v.per_network})
    loss = {}
    for net in networks:
        entered = [
            pn for v in per_vehicle if (pn := v.per_network.get(net)) and pn.entered_coverage
        ]
        if not entered:
            continue
        failed = sum(1 for pn in entered if pn.completed_messages == 0)
        loss[net] = 100.0 * failed / len(entered)
    return AggregateStats(
        total_frames_sent=sum(ap.frames_sent for ap in per_ap),
        total_completed_messages=sum(v.completed_messages for v in per_vehicle),
        frames_received_per_car=sum(v.frames_received for v in per_vehicle) / n if n else 0.0,
        frames_lost_per_car=sum(v.frames_lost for v in per_vehicle) / n if n else 0.0,
        duplicate_frames_per_car=sum(v.duplicate_frames for v in per_vehicle) / n if n else 0.0,
        vehicle_count=n,
        message_loss_pct=loss,
    )


def message_loss_pct(result: "RunResult", network_id: str) -> float:
    """Share of coverage-entering cars that never completed the message."""
    entered = [
        v
        for v in result.per_vehicle
        if network_id in v.per_network and v.per_network[network_id].entered_coverage
    ]
    if not entered:
        raise UndefinedMetricError(f"no vehicle entered coverage of {network_id!r}")
    failed = sum(1 for v in entered if v.per_network[network_id].completed_messages == 0)
    return 100.0 * failed / len(entered)


def topic_filter(completed: Message, vehicle: Vehicle) -> bool:
    """Client-side preference check on a fully received message.

    A rejected message was still transported successfully; callers tally
    it as completed and additionally as filtered.
    """
    if not vehicle.subscribed_topics:
        return True
    return completed.topic in vehicle.subscribed_topics
