"""Scenario and sweep documents: parsing, validation, canonical output.

Scenario files are JSON with an explicit schema_version. Validation
reports the offending field by path (e.g. ``aps[0].channel.loss_p``).
Defaults mirror the reference experiment setup: 90 m range, 10 ms beacon
interval, accumulate reassembly, speeds drawn from 60-70 km/h.

Message bodies may be given verbatim (``payload_hex`` / ``payload_text``)
or as ``size_bytes``, in which case deterministic pseudo-random content is
derived from (seed, ssid) so that same-name transmitters agree and reruns
reproduce byte-identical results.
"""

from __future__ import annotations

import copy
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from .channel import BeaconSchedule, ChannelParams
from .codec import Message, ReassemblyPolicy
from .engine import AccessPointSpec, Scenario
from .errors import ScenarioValidationError
from .mobility import KMH_TO_MPS, Road, TrafficKind, TrafficModel, Vehicle

SCENARIO_SCHEMA_VERSION = 1
SWEEP_SCHEMA_VERSION = 1

DEFAULT_SPEED_KMH = (60.0, 70.0)


def _fail(field: str, message: str):
    raise ScenarioValidationError(field, message)


def _require(doc: dict, field: str, path: str):
    if field not in doc:
        _fail(f"{path}.{field}" if path else field, "is required")
    return doc[field]


def _number(value, path: str, minimum=None, maximum=None, strict_min=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, "must be a number")
    v = float(value)
    if minimum is not None and (v <= minimum if strict_min else v < minimum):
        _fail(path, f"must be {'>' if strict_min else '>='} {minimum}")
    if maximum is not None and v > maximum:
        _fail(path, f"must be <= {maximum}")
    return v


def _integer(value, path: str, minimum=None, maximum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, "must be an integer")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}")
    if maximum is not None and value > maximum:
        _fail(path, f"must be <= {maximum}")
    return value


def _string(value, path: str) -> str:
    if not isinstance(value, str):
        _fail(path, "must be a string")
    return value


def _point(value, path: str) -> Tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        _fail(path, "must be a [x, y] pair")
    return (_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))


def _parse_bssid(value, path: str) -> bytes:
    s = _string(value, path)
    parts = s.split(":")
    if len(parts) != 6 or not all(len(p) == 2 for p in parts):
        _fail(path, "must look like aa:bb:cc:dd:ee:ff")
    try:
        return bytes(int(p, 16) for p in parts)
    except ValueError:
        _fail(path, "must be hex octets")


def _parse_road(doc, path: str) -> Road:
    if not isinstance(doc, dict):
        _fail(path, "must be an object")
    polyline = _require(doc, "polyline", path)
    if not isinstance(polyline, list) or len(polyline) < 2:
        _fail(f"{path}.polyline", "must list at least 2 points")
    pts = tuple(_point(p, f"{path}.polyline[{i}]") for i, p in enumerate(polyline))
    try:
        return Road(polyline=pts)
    except ValueError as e:
        _fail(f"{path}.polyline", str(e))


def _parse_traffic(doc, path: str) -> TrafficModel:
    if not isinstance(doc, dict):
        _fail(path, "must be an object")
    kind_s = _string(_require(doc, "kind", path), f"{path}.kind")
    try:
        kind = TrafficKind(kind_s)
    except ValueError:
        _fail(f"{path}.kind", f"must be one of {[k.value for k in TrafficKind]}")
    topics = frozenset(
        _string(t, f"{path}.subscribed_topics[{i}]")
        for i, t in enumerate(doc.get("subscribed_topics", []))
    )
    if kind is TrafficKind.EXPLICIT:
        raw = _require(doc, "vehicles", path)
        if not isinstance(raw, list) or not raw:
            _fail(f"{path}.vehicles", "must list at least 1 vehicle")
        vehicles = []
        for i, v in enumerate(raw):
            vp = f"{path}.vehicles[{i}]"
            if not isinstance(v, dict):
                _fail(vp, "must be an object")
            if "speed_mps" in v:
                speed = _number(v["speed_mps"], f"{vp}.speed_mps", 0, strict_min=True)
            elif "speed_kmh" in v:
                speed = _number(v["speed_kmh"], f"{vp}.speed_kmh", 0, strict_min=True) * KMH_TO_MPS
            else:
                _fail(vp, "needs speed_mps or speed_kmh")
            if "subscribed_topics" in v:
                v_topics = frozenset(
                    _string(t, f"{vp}.subscribed_topics[{j}]")
                    for j, t in enumerate(v["subscribed_topics"])
                )
            else:
                v_topics = topics
            vehicles.append(
                Vehicle(
                    id=_integer(v.get("id", i), f"{vp}.id", 0),
                    spawn_time_s=_number(v.get("spawn_time_s", 0.0), f"{vp}.spawn_time_s", 0),
                    speed_mps=speed,
                    subscribed_topics=v_topics,
                )
            )
        ids = [v.id for v in vehicles]
        if len(set(ids)) != len(ids):
            _fail(f"{path}.vehicles", "vehicle ids must be unique")
        return TrafficModel(kind=kind, vehicles=tuple(vehicles), subscribed_topics=topics)
    count = _integer(_require(doc, "count", path), f"{path}.count", 1)
    lo = _number(doc.get("speed_kmh_min", DEFAULT_SPEED_KMH[0]), f"{path}.speed_kmh_min", 0,
                 strict_min=True)
    hi = _number(doc.get("speed_kmh_max", DEFAULT_SPEED_KMH[1]), f"{path}.speed_kmh_max", 0,
                 strict_min=True)
    if lo > hi:
        _fail(f"{path}.speed_kmh_min", "must be <= speed_kmh_max")
    kwargs = dict(
        kind=kind,
        count=count,
        speed_kmh_min=lo,
        speed_kmh_max=hi,
        subscribed_topics=topics,
    )
    if kind is TrafficKind.UNIFORM_FLOW:
        kwargs["headway_s"] = _number(
            doc.get("headway_s", 2.0), f"{path}.headway_s", 0, strict_min=True
        )
    else:
        kwargs["rate_per_s"] = _number(
            doc.get("rate_per_s", 0.5), f"{path}.rate_per_s", 0, strict_min=True
        )
    return TrafficModel(**kwargs)


def _build_message(doc, path: str, seed: int, ssid: str) -> Message:
    if not isinstance(doc, dict):
        _fail(path, "must be an object")
    topic = doc.get("topic")
    if topic is not None:
        topic = _string(topic, f"{path}.topic")
        if not 1 <= len(topic.encode("utf-8")) <= 64:
            _fail(f"{path}.topic", "must be 1..64 bytes")
    sources = [k for k in ("size_bytes", "payload_hex", "payload_text") if k in doc]
    if len(sources) != 1:
        _fail(path, "needs exactly one of size_bytes, payload_hex, payload_text")
    if sources[0] == "size_bytes":
        size = _integer(doc["size_bytes"], f"{path}.size_bytes", 1)
        rng = random.Random(f"{seed}:message:{ssid}")
        if topic is None:
            return Message(payload=rng.randbytes(size))
        header = 1 + len(topic.encode("utf-8"))
        if size <= header:
            _fail(f"{path}.size_bytes", f"must exceed the {header}-byte topic header")
        return Message.with_topic(topic, rng.randbytes(size - header))
    if sources[0] == "payload_hex":
        try:
            body = bytes.fromhex(_string(doc["payload_hex"], f"{path}.payload_hex"))
        except ValueError:
            _fail(f"{path}.payload_hex", "must be valid hex")
    else:
        body = _string(doc["payload_text"], f"{path}.payload_text").encode("utf-8")
    if not body:
        _fail(f"{path}.{sources[0]}", "must not be empty")
    return Message.with_topic(topic, body) if topic else Message(payload=body)


def parse_scenario(doc: dict, seed_override: Optional[int] = None) -> Scenario:
    """Validate a scenario document and build the runnable scenario."""
    if not isinstance(doc, dict):
        _fail("$", "document must be a JSON object")
    version = _integer(_require(doc, "schema_version", ""), "schema_version", 1)
    if version != SCENARIO_SCHEMA_VERSION:
        _fail("schema_version", f"unsupported version {version}")
    seed = _integer(doc.get("seed", 0), "seed", 0, 2**64 - 1)
    if seed_override is not None:
        seed = _integer(seed_override, "seed", 0, 2**64 - 1)
    duration = _number(_require(doc, "duration_s", ""), "duration_s", 0, strict_min=True)
    policy_s = doc.get("reassembly_policy", ReassemblyPolicy.ACCUMULATE.value)
    try:
        policy = ReassemblyPolicy(_string(policy_s, "reassembly_policy"))
    except ValueError:
        _fail("reassembly_policy", f"must be one of {[p.value for p in ReassemblyPolicy]}")
    road = _parse_road(_require(doc, "road", ""), "road")
    traffic = _parse_traffic(_require(doc, "traffic", ""), "traffic")
    raw_aps = _require(doc, "aps", "")
    if not isinstance(raw_aps, list) or not raw_aps:
        _fail("aps", "must list at least 1 access point")
    aps = []
    for i, ap in enumerate(raw_aps):
        path = f"aps[{i}]"
        if not isinstance(ap, dict):
            _fail(path, "must be an object")
        position = _point(_require(ap, "position", path), f"{path}.position")
        ssid = _string(_require(ap, "ssid", path), f"{path}.ssid")
        if not ssid:
            _fail(f"{path}.ssid", "must be non-empty")
        if len(ssid.encode("utf-8")) > 32:
            _fail(f"{path}.ssid", "exceeds 32 bytes")
        if "bssid" in ap:
            bssid = _parse_bssid(ap["bssid"], f"{path}.bssid")
        else:
            bssid = bytes([0x02, 0, 0, 0, (i + 1) >> 8, (i + 1) & 0xFF])
        sched = ap.get("schedule", {})
        if not isinstance(sched, dict):
            _fail(f"{path}.schedule", "must be an object")
        interval = _integer(sched.get("interval_ms", 10), f"{path}.schedule.interval_ms", 1, 65535)
        start = _number(sched.get("start_s", 0.0), f"{path}.schedule.start_s", 0)
        end = _number(sched.get("end_s", duration), f"{path}.schedule.end_s", 0)
        if not start < end:
            _fail(f"{path}.schedule.end_s", "must be greater than start_s")
        chan = ap.get("channel", {})
        if not isinstance(chan, dict):
            _fail(f"{path}.channel", "must be an object")
        range_m = _number(chan.get("range_m", 90.0), f"{path}.channel.range_m", 0, strict_min=True)
        loss_p = _number(chan.get("loss_p", 0.0), f"{path}.channel.loss_p", 0.0, 1.0)
        message = _build_message(_require(ap, "message", path), f"{path}.message", seed, ssid)
        aps.append(
            AccessPointSpec(
                position=position,
                ssid=ssid,
                bssid=bssid,
                schedule=BeaconSchedule(interval_ms=interval, start_s=start, end_s=end),
                message=message,
                channel=ChannelParams(range_m=range_m, loss_p=loss_p),
                phase_offset=_integer(ap.get("phase_offset", 0), f"{path}.phase_offset", 0),
            )
        )
    scenario = Scenario(
        road=road,
        aps=tuple(aps),
        traffic=traffic,
        reassembly_policy=policy,
        duration_s=duration,
        seed=seed,
    )
    scenario.validate()
    return scenario


def load_scenario_doc(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioValidationError("$file", f"cannot read {path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioValidationError("$file", f"invalid JSON at line {e.lineno}: {e.msg}") from e


def load_scenario(path, seed_override: Optional[int] = None) -> Scenario:
    return parse_scenario(load_scenario_doc(path), seed_override=seed_override)


@dataclass(frozen=True)
class SweepSpec:
    """Size x loss grid replayed over replicated seeds."""

    base_doc: dict
    message_sizes_bytes: Tuple[int, ...]
    loss_ps: Tuple[float, ...]
    replications: int
    base_seed: int

    def points(self) -> List[Tuple[float, int, int, int]]:
        """(loss_p, size_bytes, replication, seed), loss-major then size."""
        return [
            (loss, size, r, self.base_seed + r)
            for loss in self.loss_ps
            for size in self.message_sizes_bytes
            for r in range(self.replications)
        ]

    def scenario_for(self, loss_p: float, size_bytes: int, seed: int) -> Scenario:
        doc = copy.deepcopy(self.base_doc)
        for ap in doc["aps"]:
            topic = ap.get("message", {}).get("topic")
            ap["message"] = {"size_bytes": size_bytes}
            if topic is not None:
                ap["message"]["topic"] = topic
            ap.setdefault("channel", {})["loss_p"] = loss_p
        return parse_scenario(doc, seed_override=seed)


def parse_sweep(doc: dict, base_dir: Optional[Path] = None) -> SweepSpec:
    if not isinstance(doc, dict):
        _fail("$", "document must be a JSON object")
    version = _integer(_require(doc, "schema_version", ""), "schema_version", 1)
    if version != SWEEP_SCHEMA_VERSION:
        _fail("schema_version", f"unsupported version {version}")
    if ("base" in doc) == ("base_path" in doc):
        _fail("base", "needs exactly one of base, base_path")
    if "base" in doc:
        base_doc = doc["base"]
    else:
        rel = Path(_string(doc["base_path"], "base_path"))
        base_doc = load_scenario_doc((base_dir or Path.cwd()) / rel)
    base = parse_scenario(base_doc)  # validate eagerly, fail fast
    sizes = doc.get("message_sizes_bytes")
    if not isinstance(sizes, list) or not sizes:
        _fail("message_sizes_bytes", "must be a non-empty list")
    sizes = tuple(_integer(s, f"message_sizes_bytes[{i}]", 1) for i, s in enumerate(sizes))
    losses = doc.get("loss_ps")
    if not isinstance(losses, list) or not losses:
        _fail("loss_ps", "must be a non-empty list")
    losses = tuple(_number(p, f"loss_ps[{i}]", 0.0, 1.0) for i, p in enumerate(losses))
    reps = _integer(doc.get("replications", 1), "replications", 1)
    base_seed = _integer(doc.get("base_seed", base.seed), "base_seed", 0)
    return SweepSpec(
        base_doc=base_doc,
        message_sizes_bytes=sizes,
        loss_ps=losses,
        replications=reps,
        base_seed=base_seed,
    )


def load_sweep(path) -> SweepSpec:
    return parse_sweep(load_scenario_doc(path), base_dir=Path(path).parent)
