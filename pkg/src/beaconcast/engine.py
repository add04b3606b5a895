"""Deterministic discrete-event simulation of looping roadside emitters.

Each access point emits one message fragment per beacon, cycling through
the fragment list forever. Emissions are processed in (time, AP index)
order; at each emission every in-range vehicle draws an independent loss
coin and, on delivery, feeds the fragment to its per-network-name
reassembly buffer. Everything is a pure function of (scenario, seed):
event times are exact (integer microseconds, rationals as a fallback),
vehicle positions are evaluated lazily at emission instants, and the
random stream is consumed in a fixed, documented order — one draw per
in-range (frame, vehicle) pair, vehicles polled in spawn order.
"""

from __future__ import annotations

import hashlib
import heapq
import random
from bisect import insort
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import metrics as _metrics
from .canonical import digest as _digest
from .channel import BeaconSchedule, ChannelParams, Point, emission_count
from .codec import (
    FragmentRecord,
    FrameOutcome,
    Message,
    ReassemblyBuffer,
    ReassemblyPolicy,
    fragment,
)
from .errors import ConflictingTotalError, ScenarioValidationError
from .mobility import Road, TrafficModel, Vehicle, coverage_intervals, generate_vehicles, merge_intervals

RESULT_SCHEMA_VERSION = 1

# Candidate windows are padded by this much on each side; the closed-disk
# predicate at the emission instant stays the authoritative range check.
_WINDOW_PAD_US = 1000

# One offered frame: (time_s, ap_index, vehicle_id, seq_no, delivered, status).
FrameEvent = Tuple[float, int, int, int, bool, str]


def format_bssid(bssid: bytes) -> str:
    return ":".join(f"{b:02x}" for b in bssid)


@dataclass(frozen=True)
class AccessPointSpec:
    position: Point
    ssid: str
    bssid: bytes
    schedule: BeaconSchedule
    message: Message
    channel: ChannelParams
    phase_offset: int = 0


@dataclass(frozen=True)
class Scenario:
    road: Road
    aps: Tuple[AccessPointSpec, ...]
    traffic: TrafficModel
    reassembly_policy: ReassemblyPolicy = ReassemblyPolicy.ACCUMULATE
    duration_s: float = 60.0
    seed: int = 0

    def validate(self) -> None:
        if not self.aps:
            raise ScenarioValidationError("aps", "at least one access point required")
        if not self.duration_s > 0:
            raise ScenarioValidationError("duration_s", "must be positive")
        if not 0 <= self.seed < 2**64:
            raise ScenarioValidationError("seed", "must fit in 64 bits")
        if self.traffic.kind.value == "explicit":
            for j, v in enumerate(self.traffic.vehicles):
                if v.spawn_time_s < 0:
                    raise ScenarioValidationError(
                        f"traffic.vehicles[{j}].spawn_time_s", "must be >= 0"
                    )
        seen_bssids = set()
        by_ssid: Dict[str, AccessPointSpec] = {}
        for i, ap in enumerate(self.aps):
            where = f"aps[{i}]"
            if not ap.ssid:
                raise ScenarioValidationError(f"{where}.ssid", "must be non-empty")
            if len(ap.ssid.encode("utf-8")) > 32:
                raise ScenarioValidationError(f"{where}.ssid", "exceeds 32 bytes")
            if len(ap.bssid) != 6:
                raise ScenarioValidationError(f"{where}.bssid", "must be 6 bytes")
            if ap.bssid in seen_bssids:
                raise ScenarioValidationError(
                    f"{where}.bssid", f"duplicate {format_bssid(ap.bssid)}"
                )
            seen_bssids.add(ap.bssid)
            if ap.schedule.start_s < 0:
                raise ScenarioValidationError(f"{where}.schedule.start_s", "must be >= 0")
            if ap.schedule.end_s > self.duration_s:
                raise ScenarioValidationError(
                    f"{where}.schedule.end_s", "extends beyond scenario duration"
                )
            if ap.phase_offset < 0:
                raise ScenarioValidationError(f"{where}.phase_offset", "must be >= 0")
            prior = by_ssid.get(ap.ssid)
            if prior is None:
                by_ssid[ap.ssid] = ap
            elif prior.message.payload != ap.message.payload:
                # Same-name transmitters look like one source to receivers;
                # differing payloads would silently corrupt reassembly.
                raise ScenarioValidationError(
                    f"{where}.message", f"differs from other APs sharing ssid {ap.ssid!r}"
                )

    def to_dict(self) -> dict:
        """Normalized content document (message bodies appear as hashes)."""
        aps = []
        for ap in self.aps:
            aps.append(
                {
                    "position": list(ap.position),
                    "ssid": ap.ssid,
                    "bssid": format_bssid(ap.bssid),
                    "phase_offset": ap.phase_offset,
                    "schedule": {
                        "interval_ms": ap.schedule.interval_ms,
                        "start_s": ap.schedule.start_s,
                        "end_s": ap.schedule.end_s,
                    },
                    "channel": {"range_m": ap.channel.range_m, "loss_p": ap.channel.loss_p},
                    "message": {
                        "size_bytes": len(ap.message.payload),
                        "payload_sha256": hashlib.sha256(ap.message.payload).hexdigest(),
                        "topic": ap.message.topic,
                    },
                }
            )
        traffic = {"kind": self.traffic.kind.value}
        if self.traffic.kind.value == "explicit":
            traffic["vehicles"] = [
                {
                    "id": v.id,
                    "spawn_time_s": v.spawn_time_s,
                    "speed_mps": v.speed_mps,
                    "subscribed_topics": sorted(v.subscribed_topics),
                }
                for v in self.traffic.vehicles
            ]
        else:
            traffic["count"] = self.traffic.count
            traffic["speed_kmh_min"] = self.traffic.speed_kmh_min
            traffic["speed_kmh_max"] = self.traffic.speed_kmh_max
            traffic["subscribed_topics"] = sorted(self.traffic.subscribed_topics)
            if self.traffic.kind.value == "uniform_flow":
                traffic["headway_s"] = self.traffic.headway_s
            else:
                traffic["rate_per_s"] = self.traffic.rate_per_s
        return {
            "schema_version": 1,
            "seed": self.seed,
            "duration_s": self.duration_s,
            "reassembly_policy": self.reassembly_policy.value,
            "road": {"polyline": [list(p) for p in self.road.polyline]},
            "traffic": traffic,
            "aps": aps,
        }

    def digest(self) -> str:
        return _digest(self.to_dict())


@dataclass
class RunResult:
    seed: int
    duration_s: float
    scenario_digest: str
    per_ap: List[_metrics.ApStats]
    per_vehicle: List[_metrics.VehicleStats]
    aggregate: _metrics.AggregateStats
    events: Optional[List[FrameEvent]] = None

    def to_dict(self) -> dict:
        """Result document (events travel separately, never in here)."""
        return {
            "schema_version": RESULT_SCHEMA_VERSION,
            "seed": self.seed,
            "duration_s": self.duration_s,
            "scenario_digest": self.scenario_digest,
            "per_ap": [ap.to_dict() for ap in self.per_ap],
            "per_vehicle": [v.to_dict() for v in self.per_vehicle],
            "aggregate": self.aggregate.to_dict(),
        }


def ap_fragment_at(ap: AccessPointSpec, emission_index: int) -> FragmentRecord:
    """Fragment the AP's loop transmits at the given emission."""
    if emission_index < 0:
        raise ValueError("emission_index must be >= 0")
    frags = fragment(ap.message)
    return frags[(emission_index + ap.phase_offset) % len(frags)]


def traffic_rng(seed: int) -> random.Random:
    return random.Random(f"{seed}:traffic")


def channel_rng(seed: int) -> random.Random:
    return random.Random(f"{seed}:channel")


def _emission_time_keys(schedule: BeaconSchedule):
    """(keys, to_seconds) for one AP's emissions, exact and orderable.

    Keys are integer microseconds whenever the schedule start lands on a
    microsecond; otherwise exact rationals (still microsecond units) so
    cross-AP ordering never degrades to float comparisons.
    """
    start_us = Fraction(schedule.start_s) * 1_000_000
    step_us = schedule.interval_ms * 1000
    n = emission_count(schedule)
    if start_us.denominator == 1:
        s = int(start_us)
        return [s + k * step_us for k in range(n)]
    return [start_us + k * step_us for k in range(n)]


def run(scenario: Scenario, record_events: bool = False) -> RunResult:
    """Execute one simulation; pure function of the scenario (incl. seed)."""
    scenario.validate()
    road = scenario.road
    seed = scenario.seed
    duration_us = Fraction(scenario.duration_s) * 1_000_000

    vehicles = generate_vehicles(scenario.traffic, traffic_rng(seed))
    # Polling order is spawn order; ids break ties deterministically.
    vehicles = sorted(vehicles, key=lambda v: (v.spawn_time_s, v.id))
    n_veh = len(vehicles)
    if n_veh == 0:
        raise ScenarioValidationError("traffic", "at least one vehicle required")

    # Per-AP runtime state.
    ap_frags: List[List[FragmentRecord]] = []
    ap_nfrag: List[int] = []
    ap_stats: List[_metrics.ApStats] = []
    networks: List[str] = []  # unique ssids, in AP declaration order
    net_index: Dict[str, int] = {}
    for i, ap in enumerate(scenario.aps):
        frags = fragment(ap.message)
        ap_frags.append(frags)
        ap_nfrag.append(len(frags))
        ap_stats.append(
            _metrics.ApStats(
                index=i,
                ssid=ap.ssid,
                bssid=format_bssid(ap.bssid),
                position=ap.position,
                range_m=ap.channel.range_m,
                interval_ms=ap.schedule.interval_ms,
                message_size_bytes=len(ap.message.payload),
                fragment_count=len(frags),
                time_running_s=ap.schedule.end_s - ap.schedule.start_s,
            )
        )
        if ap.ssid not in net_index:
            net_index[ap.ssid] = len(networks)
            networks.append(ap.ssid)

    veh_stats = [
        _metrics.VehicleStats(id=v.id, spawn_time_s=v.spawn_time_s, speed_mps=v.speed_mps)
        for v in vehicles
    ]

    # Geometric coverage: per (vehicle, AP) for candidate windows, merged
    # per network for entered/exit accounting.
    per_ap_cov: List[List[Tuple[float, float, int]]] = [[] for _ in scenario.aps]
    finalize_events: List[Tuple[object, int, int, int]] = []
    end_finalize: List[Tuple[int, int]] = []
    for rank, v in enumerate(vehicles):
        cov_by_ap = [
            coverage_intervals(v, ap.position, ap.channel.range_m, road) for ap in scenario.aps
        ]
        for ap_i, ivs in enumerate(cov_by_ap):
            for lo, hi in ivs:
                lo_us = int(lo * 1_000_000) - _WINDOW_PAD_US
                hi_us = int(hi * 1_000_000) + _WINDOW_PAD_US
                per_ap_cov[ap_i].append((lo_us, hi_us, rank))
        for net_i, net in enumerate(networks):
            merged = merge_intervals(
                [cov_by_ap[ap_i] for ap_i, ap in enumerate(scenario.aps) if ap.ssid == net]
            )
            entered = False
            for lo, hi in merged:
                lo_us = Fraction(lo) * 1_000_000
                if lo_us >= duration_us:
                    continue
                entered = True
                hi_us = int(hi * 1_000_000) + _WINDOW_PAD_US
                if hi_us < duration_us:
                    finalize_events.append((hi_us, 1, rank, net_i))
                else:
                    end_finalize.append((rank, net_i))
            if entered:
                veh_stats[rank].per_network[net] = _metrics.NetworkVehicleStats(
                    entered_coverage=True
                )
    finalize_events.sort()

    def emission_stream(ap_i: int):
        for k, t_key in enumerate(_emission_time_keys(scenario.aps[ap_i].schedule)):
            yield (t_key, 0, ap_i, k)

    event_iter = heapq.merge(*[emission_stream(i) for i in range(len(scenario.aps))],
                             iter(finalize_events))

    rng = channel_rng(seed)
    rng_random = rng.random

    n_nets = len(networks)
    # Reassembly state indexed [vehicle rank][network index].
    buffers: List[List[Optional[ReassemblyBuffer]]] = [[None] * n_nets for _ in range(n_veh)]
    policy = scenario.reassembly_policy
    net_message = {ap.ssid: ap.message for ap in scenario.aps}
    events: Optional[List[FrameEvent]] = [] if record_events else None

    road_len = road.length_m
    pts = road.polyline
    single_segment = len(pts) == 2
    if single_segment:
        (x0, y0), (x1, y1) = pts
        ux = (x1 - x0) / road_len
        uy = (y1 - y0) / road_len
    point_at = road.point_at

    spawn = [v.spawn_time_s for v in vehicles]
    speed = [v.speed_mps for v in vehicles]
    ext_id = [v.id for v in vehicles]

    # Hot counters as flat arrays; folded into the stats records afterwards.
    offered = [0] * n_veh
    received = [0] * n_veh
    lost = [0] * n_veh
    stored_new = [0] * n_veh
    duplicates = [0] * n_veh
    discarded = [0] * n_veh
    completed = [0] * n_veh
    dropped = [0] * n_veh
    filtered = [0] * n_veh
    frames_sent = [0] * len(scenario.aps)
    loops = [0] * len(scenario.aps)

    # Per-AP sweep state over candidate windows: entries sorted by start,
    # active candidates kept in rank (= spawn) order.
    for cov in per_ap_cov:
        cov.sort()
    ap_ptr = [0] * len(scenario.aps)
    ap_active: List[List[int]] = [[] for _ in scenario.aps]
    ap_exit: List[Dict[int, int]] = [{} for _ in scenario.aps]

    INCOMPLETE = FrameOutcome.INCOMPLETE
    DUPLICATE = FrameOutcome.DUPLICATE
    COMPLETED = FrameOutcome.COMPLETED
    _STATUS = {o: o.value for o in FrameOutcome}

    def net_stats(rank: int, net: str) -> _metrics.NetworkVehicleStats:
        # Receiving a frame implies coverage even if the float interval
        # roots placed the boundary a hair off; create on demand.
        pn = veh_stats[rank].per_network.get(net)
        if pn is None:
            pn = _metrics.NetworkVehicleStats(entered_coverage=True)
            veh_stats[rank].per_network[net] = pn
        return pn

    def finalize(rank: int, net_i: int) -> None:
        buf = buffers[rank][net_i]
        if buf is None or buf.completed or not buf.fragments:
            return
        dropped[rank] += 1
        net_stats(rank, networks[net_i]).dropped_messages += 1

    for ev in event_iter:
        if ev[1] == 1:
            finalize(ev[2], ev[3])
            continue
        t_key, _, ap_i, k = ev
        ap = scenario.aps[ap_i]
        nfrag = ap_nfrag[ap_i]
        frag_idx = (k + ap.phase_offset) % nfrag
        frames_sent[ap_i] += 1
        if frag_idx == nfrag - 1:
            loops[ap_i] += 1

        # Advance this AP's candidate window sweep.
        cov = per_ap_cov[ap_i]
        ptr = ap_ptr[ap_i]
        active = ap_active[ap_i]
        exits = ap_exit[ap_i]
        if ptr < len(cov) and cov[ptr][0] <= t_key:
            while ptr < len(cov) and cov[ptr][0] <= t_key:
                lo_us, hi_us, rank = cov[ptr]
                if rank not in exits:
                    insort(active, rank)
                exits[rank] = hi_us
                ptr += 1
            ap_ptr[ap_i] = ptr
        if not active:
            continue

        t = t_key / 1e6 if type(t_key) is int else float(t_key / 1_000_000)
        apx, apy = ap.position
        r2 = ap.channel.range_m * ap.channel.range_m
        loss_p = ap.channel.loss_p
        net_i = net_index[ap.ssid]
        frag = ap_frags[ap_i][frag_idx]
        seq = frag.seq_no
        stale = None

        for rank in active:
            if exits[rank] < t_key:
                if stale is None:
                    stale = [rank]
                else:
                    stale.append(rank)
                continue
            s = (t - spawn[rank]) * speed[rank]
            if s < 0.0 or s > road_len:
                continue
            if single_segment:
                px = x0 + ux * s
                py = y0 + uy * s
            else:
                px, py = point_at(s)
            dx = apx - px
            dy = apy - py
            if dx * dx + dy * dy > r2:
                continue

            offered[rank] += 1
            if rng_random() < loss_p:
                lost[rank] += 1
                if events is not None:
                    events.append((t, ap_i, ext_id[rank], seq, False, "lost"))
                continue
            received[rank] += 1
            row = buffers[rank]
            buf = row[net_i]
            if buf is None:
                buf = row[net_i] = ReassemblyBuffer(network_id=ap.ssid, policy=policy)
            try:
                outcome = buf.on_frame(frag)
            except ConflictingTotalError:
                discarded[rank] += 1
                outcome = None
            if outcome is INCOMPLETE:
                stored_new[rank] += 1
            elif outcome is DUPLICATE:
                duplicates[rank] += 1
            elif outcome is COMPLETED:
                stored_new[rank] += 1
                msg = net_message[ap.ssid]
                if buf.payload() != msg.payload:
                    raise RuntimeError(
                        f"reassembled payload mismatch for {ap.ssid!r}"
                    )  # pragma: no cover - engine integrity check
                completed[rank] += 1
                net_stats(rank, ap.ssid).completed_messages += 1
                if not _metrics.topic_filter(msg, vehicles[rank]):
                    filtered[rank] += 1
            elif outcome is not None:  # RESET
                discarded[rank] += 1
                dropped[rank] += 1
                net_stats(rank, ap.ssid).dropped_messages += 1
            if events is not None:
                status = "conflict" if outcome is None else _STATUS[outcome]
                events.append((t, ap_i, ext_id[rank], seq, True, status))

        if stale is not None:
            for rank in stale:
                active.remove(rank)
                del exits[rank]

    for rank, net_i in end_finalize:
        finalize(rank, net_i)

    for ap_i, stats in enumerate(ap_stats):
        stats.frames_sent = frames_sent[ap_i]
        stats.complete_loops = loops[ap_i]
    for rank, vs in enumerate(veh_stats):
        vs.frames_offered = offered[rank]
        vs.frames_received = received[rank]
        vs.frames_lost = lost[rank]
        vs.frames_stored_new = stored_new[rank]
        vs.duplicate_frames = duplicates[rank]
        vs.frames_discarded = discarded[rank]
        vs.completed_messages = completed[rank]
        vs.dropped_messages = dropped[rank]
        vs.filtered_messages = filtered[rank]

    aggregate = _metrics.fold_aggregate(ap_stats, veh_stats)
    return RunResult(
        seed=seed,
        duration_s=scenario.duration_s,
        scenario_digest=scenario.digest(),
        per_ap=ap_stats,
        per_vehicle=veh_stats,
        aggregate=aggregate,
        events=events,
    )
