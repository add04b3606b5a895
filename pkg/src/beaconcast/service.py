"""Run-management HTTP service backing the scenario studio.

Endpoints (JSON):

    POST /api/runs                submit a scenario document -> 202 {run_id}
    GET  /api/runs/{id}           handle with embedded result when done
    GET  /api/runs/{id}/result    raw canonical result document (bytes
                                  identical to the CLI's output file)
    GET  /api/runs/{id}/events    every stride-th offered-frame record
    GET  /api/analytic            closed-form estimate
    GET  /api/health

Runs execute on a bounded FIFO worker pool; the in-memory registry keeps
the most recent runs only (restart simply forgets them — runs are cheap
and re-submittable).
"""

from __future__ import annotations

import threading
import time
import uuid
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from .analytic import estimate, frames_for_message, loop_time
from .canonical import canonical_json_bytes
from .engine import FrameEvent, RunResult, run as run_engine
from .errors import ScenarioValidationError
from .scenario_io import parse_scenario

QUEUED = "QUEUED"
RUNNING = "RUNNING"
DONE = "DONE"
FAILED = "FAILED"


@dataclass
class RunHandle:
    run_id: str
    status: str = QUEUED
    submitted_at: float = field(default_factory=time.time)
    result: Optional[RunResult] = None
    error: Optional[str] = None
    events: Optional[List[FrameEvent]] = None

    def to_dict(self) -> dict:
        doc = {
            "run_id": self.run_id,
            "status": self.status,
            "submitted_at": self.submitted_at,
        }
        if self.status == DONE:
            doc["result"] = self.result.to_dict()
        if self.status == FAILED:
            doc["error"] = self.error
        return doc


class RunRegistry:
    """Thread-safe LRU of recent runs; transitions are atomic."""

    def __init__(self, capacity: int = 100):
        self._lock = threading.Lock()
        self._runs: "OrderedDict[str, RunHandle]" = OrderedDict()
        self._capacity = capacity

    def add(self, handle: RunHandle) -> None:
        with self._lock:
            self._runs[handle.run_id] = handle
            while len(self._runs) > self._capacity:
                self._runs.popitem(last=False)

    def get(self, run_id: str) -> Optional[RunHandle]:
        with self._lock:
            return self._runs.get(run_id)

    def transition(self, run_id: str, status: str, **updates) -> None:
        with self._lock:
            handle = self._runs.get(run_id)
            if handle is None or handle.status in (DONE, FAILED):
                return  # evicted or already terminal
            handle.status = status
            for k, v in updates.items():
                setattr(handle, k, v)

    def queued_count(self) -> int:
        with self._lock:
            return sum(1 for h in self._runs.values() if h.status == QUEUED)


def create_app(
    max_workers: int = 2,
    registry_capacity: int = 100,
    queue_capacity: int = 32,
    static_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="beaconcast run service")
    registry = RunRegistry(capacity=registry_capacity)
    pool = ThreadPoolExecutor(max_workers=max_workers)

    def execute(run_id: str, scenario) -> None:
        registry.transition(run_id, RUNNING)
        try:
            result = run_engine(scenario, record_events=True)
        except Exception as e:  # engine failure is a run failure, not a crash
            registry.transition(run_id, FAILED, error=str(e))
            return
        events = result.events
        result.events = None
        registry.transition(run_id, DONE, result=result, events=events)

    @app.post("/api/runs", status_code=202)
    async def submit_run(request: Request):
        try:
            doc = await request.json()
        except Exception:
            return JSONResponse(status_code=400, content={"detail": "malformed JSON body"})
        try:
            scenario = parse_scenario(doc)
        except ScenarioValidationError as e:
            return JSONResponse(
                status_code=422, content={"detail": {"field": e.field, "message": str(e)}}
            )
        if registry.queued_count() >= queue_capacity:
            return JSONResponse(status_code=429, content={"detail": "run queue is full"})
        handle = RunHandle(run_id=uuid.uuid4().hex)
        registry.add(handle)
        pool.submit(execute, handle.run_id, scenario)
        return {"run_id": handle.run_id}

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        handle = registry.get(run_id)
        if handle is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown run {run_id}"})
        return handle.to_dict()

    @app.get("/api/runs/{run_id}/result")
    def get_run_result(run_id: str):
        handle = registry.get(run_id)
        if handle is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown run {run_id}"})
        if handle.status != DONE:
            return JSONResponse(
                status_code=409, content={"detail": f"run is {handle.status}, not DONE"}
            )
        return Response(
            content=canonical_json_bytes(handle.result.to_dict()),
            media_type="application/json",
        )

    @app.get("/api/runs/{run_id}/events")
    def get_run_events(run_id: str, stride: int = Query(default=1, ge=1)):
        handle = registry.get(run_id)
        if handle is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown run {run_id}"})
        if handle.status != DONE:
            return JSONResponse(
                status_code=409, content={"detail": f"run is {handle.status}, not DONE"}
            )
        sampled = handle.events[::stride]
        return {
            "run_id": run_id,
            "stride": stride,
            "total_events": len(handle.events),
            "events": [
                {
                    "time_s": t,
                    "ap_index": ap_i,
                    "vehicle_id": vid,
                    "seq_no": seq,
                    "delivered": delivered,
                    "status": status,
                }
                for t, ap_i, vid, seq, delivered, status in sampled
            ],
        }

    @app.get("/api/analytic")
    def get_analytic(
        range_m: float = Query(default=90.0, gt=0),
        speed_kmh: float = Query(gt=0),
        interval_ms: int = Query(default=10, ge=1, le=65535),
        size_bytes: Optional[int] = Query(default=None, ge=1),
    ):
        est = estimate(range_m, speed_kmh, interval_ms)
        doc = {
            "time_to_ap_s": est.time_to_ap_s,
            "time_total_s": est.time_total_s,
            "frames_to_ap": est.frames_to_ap,
            "frames_total": est.frames_total,
            "bytes_to_ap": est.bytes_to_ap,
            "bytes_total": est.bytes_total,
        }
        if size_bytes is not None:
            doc["message_frames"] = frames_for_message(size_bytes)
            doc["message_loop_s"] = loop_time(size_bytes, interval_ms)
        return doc

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    static = static_dir or str(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    if Path(static).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static, html=True), name="studio")
    return app
