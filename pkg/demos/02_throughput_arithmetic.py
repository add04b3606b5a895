#!/usr/bin/env python3
"""Closed-form throughput bounds for a car passing a beacon emitter.

How much data fits through the window while a car crosses a 90 m
transmission disk? The arithmetic depends only on range, speed, and the
beacon interval: frames = floor(time / interval), 250 payload bytes per
frame.
"""

from beaconcast import estimate, frames_for_message, loop_time
from beaconcast.analytic import expected_missing_fragments

print("city driving, 50 km/h, 90 m range, 10 ms beacons")
est = estimate(90, 50, 10)
print(f"  time to reach the emitter : {est.time_to_ap_s:.2f} s (~6.5 s)")
print(f"  frames before reaching it : {est.frames_to_ap} (~650)")
print(f"  bytes before reaching it  : {est.bytes_to_ap} ({est.bytes_to_ap / 1024:.0f} KB)")
print(f"  bytes across the full disk: {est.bytes_total} ({est.bytes_total / 1024:.0f} KB)")

print("\nhighway-ish, 70 km/h")
est70 = estimate(90, 70, 10)
print(f"  time to reach the emitter : {est70.time_to_ap_s:.2f} s")

print("\nmessage sizes vs loop duration at 10 ms:")
for kb in (16, 32, 64, 112):
    size = kb * 1024
    print(f"  {kb:4d} KB -> {frames_for_message(size):4d} frames, "
          f"loop every {loop_time(size, 10):5.2f} s")

print("\nwhy ~112 KB is the cliff at 70 km/h:")
dwell = est70.time_total_s
loop = loop_time(112 * 1024, 10)
print(f"  full-disk dwell {dwell:.2f} s vs loop {loop:.2f} s -> {dwell / loop:.2f} loops")
for p in (0.05, 0.10):
    missing = expected_missing_fragments(459, p, dwell / loop)
    print(f"  at {p:.0%} loss, ~{missing:.1f} fragments expected missing after the dwell")
