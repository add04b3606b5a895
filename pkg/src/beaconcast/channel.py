"""Radio model: hard-cutoff range, i.i.d. packet loss, beacon scheduling.

The range model is a closed disk: at or inside the configured radius every
beacon is a candidate for reception, beyond it all are lost. Loss inside
the disk is an independent coin flip per (frame, receiver) pair, so two
cars next to the same transmitter can disagree about one beacon.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Tuple

Point = Tuple[float, float]

DEFAULT_RANGE_M = 90.0
DEFAULT_INTERVAL_MS = 10
MIN_INTERVAL_MS = 1
MAX_INTERVAL_MS = 65535


@dataclass(frozen=True)
class ChannelParams:
    range_m: float = DEFAULT_RANGE_M
    loss_p: float = 0.0

    def __post_init__(self):
        if not self.range_m > 0:
            raise ValueError(f"range_m must be positive, got {self.range_m}")
        if not 0.0 <= self.loss_p <= 1.0:
            raise ValueError(f"loss_p must be within [0, 1], got {self.loss_p}")


@dataclass(frozen=True)
class BeaconSchedule:
    """Periodic emission plan: one beacon every interval_ms in [start_s, end_s)."""

    interval_ms: int = DEFAULT_INTERVAL_MS
    start_s: float = 0.0
    end_s: float = 1.0

    def __post_init__(self):
        if not MIN_INTERVAL_MS <= self.interval_ms <= MAX_INTERVAL_MS:
            raise ValueError(
                f"interval_ms must be within {MIN_INTERVAL_MS}..{MAX_INTERVAL_MS}, "
                f"got {self.interval_ms}"
            )
        if not self.start_s < self.end_s:
            raise ValueError(f"schedule window empty: [{self.start_s}, {self.end_s})")


def in_range(ap_pos: Point, veh_pos: Point, range_m: float) -> bool:
    """Closed-disk membership: distance exactly equal to range counts."""
    dx = ap_pos[0] - veh_pos[0]
    dy = ap_pos[1] - veh_pos[1]
    return dx * dx + dy * dy <= range_m * range_m


def delivery_draw(rng: random.Random, loss_p: float) -> bool:
    """One loss coin flip; True means the frame reached the receiver."""
    return rng.random() >= loss_p


def emission_instants(schedule: BeaconSchedule) -> Iterator[Fraction]:
    """Exact emission times start + k*interval/1000, strictly below end.

    Exact rationals so that counting and cross-transmitter ordering never
    depend on accumulated float error.
    """
    start = Fraction(schedule.start_s)
    end = Fraction(schedule.end_s)
    step = Fraction(schedule.interval_ms, 1000)
    k = 0
    t = start
    while t < end:
        yield t
        k += 1
        t = start + step * k


def emission_count(schedule: BeaconSchedule) -> int:
    """Number of emissions in the window, without enumerating them."""
    start = Fraction(schedule.start_s)
    end = Fraction(schedule.end_s)
    step = Fraction(schedule.interval_ms, 1000)
    # Largest k with start + k*step < end, plus one for k = 0.
    span = (end - start) / step
    n = math.ceil(span)
    return n


def emission_times(schedule: BeaconSchedule) -> List[float]:
    """Emission instants as float seconds."""
    return [float(t) for t in emission_instants(schedule)]
