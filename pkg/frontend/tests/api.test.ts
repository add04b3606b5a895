import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

type Route = (init?: RequestInit) => { status: number; body: unknown };

function stubFetch(routes: Record<string, Route>) {
  const calls: string[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push(url);
    const route = routes[url];
    if (!route) return new Response(JSON.stringify({ detail: "not found" }), { status: 404 });
    const { status, body } = route(init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

const SCENARIO = {
  schema_version: 1 as const,
  seed: 1,
  duration_s: 10,
  reassembly_policy: "accumulate" as const,
  road: { polyline: [[0, 0], [100, 0]] as [number, number][] },
  traffic: { kind: "uniform_flow" as const, count: 1, headway_s: 1, speed_kmh_min: 50, speed_kmh_max: 50 },
  aps: [],
};

describe("run lifecycle", () => {
  it("submits then polls to DONE", async () => {
    let polls = 0;
    const { fetchFn } = stubFetch({
      "/api/runs": (init) => {
        expect(init?.method).toBe("POST");
        expect(JSON.parse(String(init?.body)).schema_version).toBe(1);
        return { status: 202, body: { run_id: "r1" } };
      },
      "/api/runs/r1": () => {
        polls += 1;
        return polls < 3
          ? { status: 200, body: { run_id: "r1", status: "RUNNING", submitted_at: 0 } }
          : {
              status: 200,
              body: {
                run_id: "r1",
                status: "DONE",
                submitted_at: 0,
                result: { aggregate: { message_loss_pct: { net: 12.5 } } },
              },
            };
      },
    });
    const api = new ApiClient("", fetchFn);
    const runId = await api.submitRun(SCENARIO);
    const handle = await api.pollRun(runId, { sleep: async () => {}, intervalMs: 0 });
    expect(polls).toBe(3);
    expect(handle.result?.aggregate.message_loss_pct.net).toBe(12.5);
  });

  it("surfaces 422 with the offending field", async () => {
    const { fetchFn } = stubFetch({
      "/api/runs": () => ({
        status: 422,
        body: { detail: { field: "aps[0].channel.loss_p", message: "must be <= 1" } },
      }),
    });
    const api = new ApiClient("", fetchFn);
    const err = await api.submitRun(SCENARIO).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.field).toBe("aps[0].channel.loss_p");
  });

  it("reports failed runs as errors", async () => {
    const { fetchFn } = stubFetch({
      "/api/runs/r2": () => ({
        status: 200,
        body: { run_id: "r2", status: "FAILED", submitted_at: 0, error: "boom" },
      }),
    });
    const api = new ApiClient("", fetchFn);
    const err = await api.pollRun("r2", { sleep: async () => {} }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(String(err.message)).toContain("boom");
  });

  it("passes the stride through to the events endpoint", async () => {
    const { fetchFn, calls } = stubFetch({
      "/api/runs/r1/events?stride=7": () => ({
        status: 200,
        body: { run_id: "r1", stride: 7, total_events: 21, events: [] },
      }),
    });
    const api = new ApiClient("", fetchFn);
    const doc = await api.getEvents("r1", 7);
    expect(doc.stride).toBe(7);
    expect(calls).toEqual(["/api/runs/r1/events?stride=7"]);
  });

  it("health returns false when unreachable", async () => {
    const api = new ApiClient("", async () => {
      throw new Error("refused");
    });
    expect(await api.health()).toBe(false);
  });
});
