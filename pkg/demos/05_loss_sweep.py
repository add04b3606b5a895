#!/usr/bin/env python3
"""Message-loss-versus-message-size grid on a reduced fleet.

A quick version of the shipped reference sweep (scenarios/table1_sweep.json
runs 400 cars x 10 replications; this uses 100 cars x 2 replications so it
finishes in a few seconds). The cliff appears where the message loop
outgrows the dwell window.
"""

from beaconcast import run
from beaconcast.metrics import message_loss_pct
from beaconcast.scenario_io import SweepSpec

base = {
    "schema_version": 1,
    "seed": 42,
    "duration_s": 330.0,
    "road": {"polyline": [[0, 0], [2000, 0]]},
    "traffic": {"kind": "uniform_flow", "count": 100, "headway_s": 2.0},
    "aps": [
        {
            "position": [1000, 0],
            "ssid": "ad-net",
            "channel": {"range_m": 90.0},
            "message": {"size_bytes": 16384},
        }
    ],
}

sizes = [16384, 32768, 49152, 65536, 81920, 98304, 114688]
losses = [0.05, 0.10]
spec = SweepSpec(
    base_doc=base, message_sizes_bytes=tuple(sizes), loss_ps=tuple(losses),
    replications=2, base_seed=42,
)

print(f"{'':>8}" + "".join(f"{s // 1024:>7d}K" for s in sizes))
for loss in losses:
    cells = []
    for size in sizes:
        pcts = [
            message_loss_pct(run(spec.scenario_for(loss, size, seed)), "ad-net")
            for _, _, _, seed in [p for p in spec.points() if p[0] == loss and p[1] == size]
        ]
        cells.append(sum(pcts) / len(pcts))
    print(f"{loss:>7.0%} " + "".join(f"{c:>8.1f}" for c in cells))
print("\n(cells: % of cars entering coverage that never completed the message)")
