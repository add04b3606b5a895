"""Command line front end: run, sweep, analytic, capture, serve.

Exit codes: 0 success, 1 runtime failure, 2 invalid scenario/arguments.
``BEACONCAST_SEED`` provides the seed when ``--seed`` is absent; the
scenario file's own seed is the last fallback.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from .analytic import estimate, expected_missing_fragments, frames_for_message, loop_time
from .canonical import canonical_json
from .capture import beacon_records, write_capture
from .codec import ReassemblyPolicy
from .engine import run as run_engine
from .errors import BeaconcastError, ScenarioValidationError
from .metrics import message_loss_pct
from .scenario_io import SweepSpec, load_scenario, load_sweep

_POLICY_FLAG = {"accumulate": ReassemblyPolicy.ACCUMULATE, "strict": ReassemblyPolicy.STRICT_SEQUENTIAL}


def _seed_from_env() -> Optional[int]:
    raw = os.environ.get("BEACONCAST_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ScenarioValidationError("BEACONCAST_SEED", f"not an integer: {raw!r}")


def _effective_seed(args) -> Optional[int]:
    return args.seed if args.seed is not None else _seed_from_env()


def _load(args, seed=None):
    scenario = load_scenario(args.scenario, seed_override=seed)
    if args.policy is not None:
        scenario = type(scenario)(
            road=scenario.road,
            aps=scenario.aps,
            traffic=scenario.traffic,
            reassembly_policy=_POLICY_FLAG[args.policy],
            duration_s=scenario.duration_s,
            seed=scenario.seed,
        )
    return scenario


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_run(args) -> int:
    scenario = _load(args, seed=_effective_seed(args))
    result = run_engine(scenario, record_events=args.events is not None)
    if args.events is not None:
        with open(args.events, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time_s", "ap_index", "vehicle_id", "seq_no", "delivered", "status"])
            for t, ap_i, vid, seq, delivered, status in result.events:
                writer.writerow([repr(t), ap_i, vid, seq, int(delivered), status])
    if args.format == "csv":
        rows = [v.to_dict() for v in result.per_vehicle]
        for row in rows:
            row.pop("per_network")
        header = list(rows[0].keys())
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(str(row[k]) for k in header))
        _write_text(args.out, "\n".join(lines) + "\n")
    else:
        _write_text(args.out, canonical_json(result.to_dict()))
    return 0


def _sweep_point(payload):
    """Worker for one (loss, size, replication) grid point."""
    base_doc, loss, size, rep, seed = payload
    spec = SweepSpec(
        base_doc=base_doc,
        message_sizes_bytes=(size,),
        loss_ps=(loss,),
        replications=1,
        base_seed=seed,
    )
    scenario = spec.scenario_for(loss, size, seed)
    ssids = {ap.ssid for ap in scenario.aps}
    if len(ssids) != 1:
        raise ScenarioValidationError("aps", "sweep base must use exactly one network name")
    result = run_engine(scenario)
    pct = message_loss_pct(result, next(iter(ssids)))
    return (loss, size, pct, rep, seed)


def cmd_sweep(args) -> int:
    spec = load_sweep(args.sweep)
    seed = _effective_seed(args)
    if seed is not None:
        spec = SweepSpec(
            base_doc=spec.base_doc,
            message_sizes_bytes=spec.message_sizes_bytes,
            loss_ps=spec.loss_ps,
            replications=spec.replications,
            base_seed=seed,
        )
    jobs = [(spec.base_doc, loss, size, rep, s) for loss, size, rep, s in spec.points()]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_point, jobs, chunksize=1))
    else:
        rows = [_sweep_point(j) for j in jobs]
    rows.sort(key=lambda r: (spec.loss_ps.index(r[0]), spec.message_sizes_bytes.index(r[1]), r[3]))
    lines = ["loss_p,size_bytes,message_loss_pct,replication,seed"]
    for loss, size, pct, rep, s in rows:
        lines.append(f"{repr(loss)},{size},{repr(pct)},{rep},{s}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_analytic(args) -> int:
    est = estimate(args.range_m, args.speed_kmh, args.interval_ms)
    doc = {
        "time_to_ap_s": est.time_to_ap_s,
        "time_total_s": est.time_total_s,
        "frames_to_ap": est.frames_to_ap,
        "frames_total": est.frames_total,
        "bytes_to_ap": est.bytes_to_ap,
        "bytes_total": est.bytes_total,
    }
    if args.size_bytes is not None:
        frames = frames_for_message(args.size_bytes)
        doc["message_frames"] = frames
        doc["message_loop_s"] = loop_time(args.size_bytes, args.interval_ms)
        doc["loops_within_traversal"] = est.time_total_s / doc["message_loop_s"]
        if args.loss_p is not None:
            doc["expected_missing_after_traversal"] = expected_missing_fragments(
                frames, args.loss_p, doc["loops_within_traversal"]
            )
    if args.format == "json":
        _write_text(args.out, canonical_json(doc))
    else:
        lines = [
            f"time to transmitter  {est.time_to_ap_s:.4g} s"
            f"  (rounded: {round(est.time_to_ap_s, 1):.4g} s)",
            f"full traversal       {est.time_total_s:.4g} s",
            f"frames to transmitter {est.frames_to_ap}",
            f"frames full traversal {est.frames_total}",
            f"bytes to transmitter  {est.bytes_to_ap} ({est.bytes_to_ap / 1024:.1f} KB)",
            f"bytes full traversal  {est.bytes_total} ({est.bytes_total / 1024:.1f} KB)",
        ]
        if args.size_bytes is not None:
            lines.append(f"message frames        {doc['message_frames']}")
            lines.append(f"message loop          {doc['message_loop_s']:.4g} s")
            lines.append(f"loops per traversal   {doc['loops_within_traversal']:.3g}")
            if args.loss_p is not None:
                lines.append(
                    "expected missing fragments after traversal "
                    f"{doc['expected_missing_after_traversal']:.3g} (advisory)"
                )
        _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_capture(args) -> int:
    scenario = _load(args, seed=_effective_seed(args))
    records = beacon_records(scenario)
    out = args.out or "capture.bcap"
    with open(out, "wb") as fh:
        n = write_capture(records, fh)
    print(f"wrote {n} beacon records to {out}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(max_workers=args.workers)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beaconcast",
        description="Roadside-to-vehicle beacon dissemination simulator and tooling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario, write the result document")
    p_run.add_argument("scenario", help="scenario JSON file")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--out", default=None, help="output path (default: stdout)")
    p_run.add_argument("--events", default=None, help="also write the frame event log CSV here")
    p_run.add_argument("--format", choices=["json", "csv"], default="json")
    p_run.add_argument("--policy", choices=sorted(_POLICY_FLAG), default=None,
                       help="override the reassembly policy")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a size x loss grid, write CSV")
    p_sweep.add_argument("sweep", help="sweep JSON file")
    p_sweep.add_argument("--seed", type=int, default=None, help="override the base seed")
    p_sweep.add_argument("--out", default=None, help="output path (default: stdout)")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.set_defaults(func=cmd_sweep)

    p_an = sub.add_parser("analytic", help="closed-form throughput estimate")
    p_an.add_argument("--range-m", type=float, default=90.0)
    p_an.add_argument("--speed-kmh", type=float, required=True)
    p_an.add_argument("--interval-ms", type=int, default=10)
    p_an.add_argument("--size-bytes", type=int, default=None)
    p_an.add_argument("--loss-p", type=float, default=None)
    p_an.add_argument("--out", default=None)
    p_an.add_argument("--format", choices=["json", "text"], default="text")
    p_an.set_defaults(func=cmd_analytic)

    p_cap = sub.add_parser("capture", help="serialize every emitted beacon to a BCAP file")
    p_cap.add_argument("scenario", help="scenario JSON file")
    p_cap.add_argument("--seed", type=int, default=None)
    p_cap.add_argument("--out", default=None, help="output path (default: capture.bcap)")
    p_cap.add_argument("--policy", choices=sorted(_POLICY_FLAG), default=None)
    p_cap.set_defaults(func=cmd_capture)

    p_srv = sub.add_parser("serve", help="start the HTTP run service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--workers", type=int, default=2, help="simulation worker threads")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except BeaconcastError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
