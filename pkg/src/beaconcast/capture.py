"""Beacon capture files (golden-test wire format).

Layout: magic ``BCAP``, version byte 0x01, then length-prefixed records:

    record_length  u16 BE   length of the body that follows
    timestamp_us   u64 BE
    transmitter_id 6 bytes
    ssid_length    u8, ssid bytes
    vendor_length  u8, vendor field bytes

Writers emit records in timestamp order.
"""

from __future__ import annotations

import heapq
import struct
from typing import BinaryIO, Iterable, List, NamedTuple

from .channel import emission_instants
from .codec import encode_vendor_field, fragment
from .engine import Scenario
from .errors import CaptureFormatError

MAGIC = b"BCAP"
VERSION = 1

_LEN = struct.Struct(">H")
_TS = struct.Struct(">Q")


class BeaconRecord(NamedTuple):
    timestamp_us: int
    transmitter_id: bytes
    ssid: str
    vendor: bytes


def _encode_record(rec: BeaconRecord) -> bytes:
    ssid = rec.ssid.encode("utf-8")
    if len(rec.transmitter_id) != 6:
        raise CaptureFormatError("transmitter_id must be 6 bytes")
    if len(ssid) > 255 or len(rec.vendor) > 255:
        raise CaptureFormatError("ssid/vendor field too long for u8 length")
    body = (
        _TS.pack(rec.timestamp_us)
        + rec.transmitter_id
        + bytes([len(ssid)])
        + ssid
        + bytes([len(rec.vendor)])
        + rec.vendor
    )
    return _LEN.pack(len(body)) + body


def write_capture(records: Iterable[BeaconRecord], fh: BinaryIO) -> int:
    """Write a capture stream; returns the record count."""
    ordered = sorted(records, key=lambda r: r.timestamp_us)
    fh.write(MAGIC + bytes([VERSION]))
    n = 0
    for rec in ordered:
        fh.write(_encode_record(rec))
        n += 1
    return n


def read_capture(fh: BinaryIO) -> List[BeaconRecord]:
    header = fh.read(5)
    if len(header) < 5 or header[:4] != MAGIC:
        raise CaptureFormatError("missing BCAP magic")
    if header[4] != VERSION:
        raise CaptureFormatError(f"unsupported version {header[4]}")
    records = []
    while True:
        raw_len = fh.read(2)
        if not raw_len:
            break
        if len(raw_len) < 2:
            raise CaptureFormatError("truncated record length")
        (body_len,) = _LEN.unpack(raw_len)
        body = fh.read(body_len)
        if len(body) < body_len:
            raise CaptureFormatError("truncated record body")
        if body_len < 16:
            raise CaptureFormatError("record body shorter than fixed fields")
        (ts,) = _TS.unpack_from(body)
        transmitter = body[8:14]
        ssid_len = body[14]
        if 15 + ssid_len + 1 > body_len:
            raise CaptureFormatError("ssid overruns record")
        ssid = body[15 : 15 + ssid_len].decode("utf-8")
        vendor_len = body[15 + ssid_len]
        start = 16 + ssid_len
        if start + vendor_len != body_len:
            raise CaptureFormatError("vendor field length mismatch")
        records.append(BeaconRecord(ts, transmitter, ssid, body[start:]))
    return records


def beacon_records(scenario: Scenario) -> List[BeaconRecord]:
    """Every beacon the scenario's APs emit, in (timestamp, AP) order."""
    scenario.validate()

    def stream(ap_i: int):
        ap = scenario.aps[ap_i]
        frags = fragment(ap.message)
        n = len(frags)
        for k, t in enumerate(emission_instants(ap.schedule)):
            ts = round(t * 1_000_000)
            vendor = encode_vendor_field(frags[(k + ap.phase_offset) % n])
            yield (ts, ap_i, BeaconRecord(ts, ap.bssid, ap.ssid, vendor))

    merged = heapq.merge(*[stream(i) for i in range(len(scenario.aps))], key=lambda e: e[:2])
    return [rec for _, _, rec in merged]
