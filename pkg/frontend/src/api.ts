/** Typed client for the run service; fetch is injectable for tests. */

import type { EventsDoc, RunHandleDoc, ScenarioDoc } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }

  /** Field path for 422 validation rejections, when the service names one. */
  get field(): string | null {
    if (this.detail && typeof this.detail === "object" && "field" in this.detail)
      return String((this.detail as { field: unknown }).field);
    return null;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const body = await resp.json().catch(() => null);
    if (!resp.ok) throw new ApiError(resp.status, body?.detail ?? body);
    return body as T;
  }

  async health(): Promise<boolean> {
    try {
      const doc = await this.request<{ status: string }>("/api/health");
      return doc.status === "ok";
    } catch {
      return false;
    }
  }

  async submitRun(doc: ScenarioDoc): Promise<string> {
    const out = await this.request<{ run_id: string }>("/api/runs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    });
    return out.run_id;
  }

  getRun(runId: string): Promise<RunHandleDoc> {
    return this.request<RunHandleDoc>(`/api/runs/${runId}`);
  }

  /** Poll until DONE; throws ApiError(500, error) on FAILED. */
  async pollRun(
    runId: string,
    opts: { intervalMs?: number; timeoutMs?: number; sleep?: (ms: number) => Promise<void> } = {},
  ): Promise<RunHandleDoc> {
    const intervalMs = opts.intervalMs ?? 150;
    const timeoutMs = opts.timeoutMs ?? 120_000;
    const sleep = opts.sleep ?? ((ms) => new Promise((r) => setTimeout(r, ms)));
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const handle = await this.getRun(runId);
      if (handle.status === "DONE") return handle;
      if (handle.status === "FAILED") throw new ApiError(500, handle.error ?? "run failed");
      if (Date.now() > deadline) throw new ApiError(504, `run ${runId} timed out`);
      await sleep(intervalMs);
    }
  }

  getEvents(runId: string, stride: number): Promise<EventsDoc> {
    return this.request<EventsDoc>(`/api/runs/${runId}/events?stride=${stride}`);
  }

  analytic(params: {
    range_m?: number;
    speed_kmh: number;
    interval_ms?: number;
    size_bytes?: number;
  }): Promise<Record<string, number>> {
    const q = new URLSearchParams();
    for (const [k, v] of Object.entries(params)) if (v !== undefined) q.set(k, String(v));
    return this.request<Record<string, number>>(`/api/analytic?${q}`);
  }
}
