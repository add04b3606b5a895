"""HTTP service: lifecycle, diagnostics, sampling, CLI equivalence."""

import json
import time

import pytest
from fastapi.testclient import TestClient

from beaconcast.canonical import canonical_json_bytes
from beaconcast.engine import run as run_engine
from beaconcast.scenario_io import parse_scenario
from beaconcast.service import create_app


def scenario_doc(seed=21, loss=0.1):
    return {
        "schema_version": 1,
        "seed": seed,
        "duration_s": 30.0,
        "road": {"polyline": [[0, 0], [800, 0]]},
        "traffic": {"kind": "uniform_flow", "count": 4, "headway_s": 3.0},
        "aps": [
            {
                "position": [400, 0],
                "ssid": "net",
                "channel": {"range_m": 90.0, "loss_p": loss},
                "message": {"size_bytes": 2000},
            }
        ],
    }


@pytest.fixture
def client():
    with TestClient(create_app(max_workers=1)) as c:
        yield c


def wait_done(client, run_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        doc = client.get(f"/api/runs/{run_id}").json()
        if doc["status"] in ("DONE", "FAILED"):
            return doc
        time.sleep(0.02)
    raise TimeoutError(f"run {run_id} did not finish")


class TestLifecycle:
    def test_health(self, client):
        assert client.get("/api/health").json() == {"status": "ok"}

    def test_submit_and_complete(self, client):
        resp = client.post("/api/runs", json=scenario_doc())
        assert resp.status_code == 202
        run_id = resp.json()["run_id"]
        doc = wait_done(client, run_id)
        assert doc["status"] == "DONE"
        assert doc["result"]["aggregate"]["vehicle_count"] == 4
        assert doc["result"]["seed"] == 21

    def test_malformed_json_400(self, client):
        resp = client.post(
            "/api/runs", content=b"{oops", headers={"content-type": "application/json"}
        )
        assert resp.status_code == 400

    def test_invalid_document_422_names_field(self, client):
        doc = scenario_doc()
        doc["aps"][0]["channel"]["loss_p"] = 2.0
        resp = client.post("/api/runs", json=doc)
        assert resp.status_code == 422
        assert resp.json()["detail"]["field"] == "aps[0].channel.loss_p"

    def test_unknown_run_404(self, client):
        assert client.get("/api/runs/nope").status_code == 404
        assert client.get("/api/runs/nope/events").status_code == 404
        assert client.get("/api/runs/nope/result").status_code == 404

    def test_queue_capacity_429(self):
        with TestClient(create_app(max_workers=1, queue_capacity=1)) as c:
            doc = scenario_doc()
            doc["duration_s"] = 400.0
            doc["traffic"]["count"] = 120
            codes = [c.post("/api/runs", json=doc).status_code for _ in range(8)]
            assert 429 in codes
            assert codes[0] == 202


class TestEvents:
    def submit(self, client, **kw):
        run_id = client.post("/api/runs", json=scenario_doc(**kw)).json()["run_id"]
        wait_done(client, run_id)
        return run_id

    def test_stride_one_full_log(self, client):
        run_id = self.submit(client)
        doc = client.get(f"/api/runs/{run_id}/events", params={"stride": 1}).json()
        assert doc["total_events"] == len(doc["events"]) > 0

    def test_stride_total_gives_one_record(self, client):
        run_id = self.submit(client)
        total = client.get(f"/api/runs/{run_id}/events").json()["total_events"]
        doc = client.get(f"/api/runs/{run_id}/events", params={"stride": total}).json()
        assert len(doc["events"]) == 1

    def test_stride_zero_rejected(self, client):
        run_id = self.submit(client)
        assert client.get(f"/api/runs/{run_id}/events", params={"stride": 0}).status_code == 422

    def test_event_fields(self, client):
        run_id = self.submit(client, loss=0.0)
        events = client.get(f"/api/runs/{run_id}/events").json()["events"]
        assert set(events[0]) == {
            "time_s", "ap_index", "vehicle_id", "seq_no", "delivered", "status",
        }
        assert any(e["status"] == "completed" for e in events)


class TestAnalyticEndpoint:
    def test_milestones(self, client):
        doc = client.get(
            "/api/analytic", params={"range_m": 90, "speed_kmh": 50, "interval_ms": 10}
        ).json()
        assert doc["time_to_ap_s"] == 6.48
        assert doc["frames_to_ap"] == 648
        assert doc["bytes_total"] == 324000

    def test_with_size(self, client):
        doc = client.get(
            "/api/analytic",
            params={"speed_kmh": 70, "size_bytes": 112 * 1024},
        ).json()
        assert doc["message_frames"] == 459
        assert doc["message_loop_s"] == 4.59

    def test_rejects_bad_params(self, client):
        assert client.get("/api/analytic", params={"speed_kmh": 0}).status_code == 422


class TestCrossInterfaceEquivalence:
    def test_api_result_matches_cli_bytes(self, client, tmp_path):
        doc = scenario_doc(seed=99)
        # Service route
        run_id = client.post("/api/runs", json=doc).json()["run_id"]
        wait_done(client, run_id)
        api_bytes = client.get(f"/api/runs/{run_id}/result").content
        # CLI route (same canonical writer the `run` subcommand uses)
        from beaconcast.cli import main

        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(doc))
        out = tmp_path / "result.json"
        assert main(["run", str(path), "--out", str(out)]) == 0
        assert api_bytes == out.read_bytes()
        # Both equal a direct engine invocation.
        direct = canonical_json_bytes(run_engine(parse_scenario(doc)).to_dict())
        assert api_bytes == direct
