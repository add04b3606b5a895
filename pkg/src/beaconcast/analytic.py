"""Closed-form throughput calculator; sanity oracle for the simulator.

Computes how much data a car moving at constant speed can pick up from a
looping roadside emitter: time to reach the transmitter, frames receivable
in that time, and the loop duration for a given message size. Values are
exact (no pre-rounding), e.g. 6.48 s / 648 frames for 90 m at 50 km/h with
a 10 ms interval; commonly quoted figures round these to 6.5 s / 650.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .codec import CHUNK_SIZE


@dataclass(frozen=True)
class ThroughputEstimate:
    """Receivable data while approaching (to_ap) and fully crossing (total)."""

    time_to_ap_s: float
    time_total_s: float
    frames_to_ap: int
    frames_total: int
    bytes_to_ap: int
    bytes_total: int


def estimate(range_m: float, speed_kmh: float, interval_ms: int) -> ThroughputEstimate:
    """Frames/bytes receivable inside the range disk at constant speed.

    time_to_ap covers entering the disk up to the transmitter; the full
    traversal is twice that for a transmitter sitting on the road line.
    Frame counts are floor(time/interval), computed in exact arithmetic so
    boundary cases never fall to float rounding.
    """
    if not (range_m > 0 and speed_kmh > 0 and interval_ms > 0):
        raise ValueError("estimate needs positive range, speed, and interval")
    time_to_ap = Fraction(range_m) * Fraction(36, 10) / Fraction(speed_kmh)
    time_total = 2 * time_to_ap
    interval_s = Fraction(interval_ms, 1000)
    frames_to_ap = math.floor(time_to_ap / interval_s)
    frames_total = math.floor(time_total / interval_s)
    return ThroughputEstimate(
        time_to_ap_s=float(time_to_ap),
        time_total_s=float(time_total),
        frames_to_ap=frames_to_ap,
        frames_total=frames_total,
        bytes_to_ap=frames_to_ap * CHUNK_SIZE,
        bytes_total=frames_total * CHUNK_SIZE,
    )


def frames_for_message(size_bytes: int) -> int:
    """Beacon frames needed for a message: ceil(size / 250)."""
    if size_bytes < 1:
        raise ValueError("message size must be >= 1 byte")
    return -(-size_bytes // CHUNK_SIZE)


def loop_time(size_bytes: int, interval_ms: int) -> float:
    """Seconds for one full pass through a message's fragment loop."""
    if interval_ms < 1:
        raise ValueError("interval must be >= 1 ms")
    return float(Fraction(frames_for_message(size_bytes) * interval_ms, 1000))


def expected_missing_fragments(n_fragments: int, loss_p: float, loops: float) -> float:
    """Advisory heuristic: fragments still missing after `loops` full passes.

    Each fragment survives a pass with probability loss_p of being missed,
    independently, giving N * p^k expected holes.
    """
    return n_fragments * loss_p**loops
