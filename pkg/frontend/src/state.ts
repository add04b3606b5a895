/** Studio state: the editable draft, run history, and the pin board.
 *
 * Pinned entries are immutable snapshots keyed by the server's scenario
 * digest; displayed metrics always come verbatim from the API result,
 * never from client-side recomputation.
 */

import {
  Badge,
  DEFAULT_INTERVAL_MS,
  DEFAULT_RANGE_M,
  Draft,
  defaultDraft,
  draftDigest,
  validateDraft,
} from "./schema.js";
import { snapToRoad } from "./geometry.js";
import type { Point, RunResultDoc } from "./types.js";

export interface Pin {
  digest: string;
  label: string;
  messageLossPct: Record<string, number>;
  vehicleCount: number;
  framesReceivedPerCar: number;
  runId: string;
  result: RunResultDoc;
}

export interface StudioState {
  draft: Draft;
  nextApId: number;
  runs: Array<{ runId: string; digest: string; status: string }>;
  pins: Pin[];
  selectedRunId: string | null;
}

export function initialState(): StudioState {
  return { draft: defaultDraft(), nextApId: 1, runs: [], pins: [], selectedRunId: null };
}

function bssidFor(n: number): string {
  const hi = Math.floor(n / 256) % 256;
  const lo = n % 256;
  const hex = (v: number) => v.toString(16).padStart(2, "0");
  return `02:00:00:00:${hex(hi)}:${hex(lo)}`;
}

/** Drop a transmitter at (or snapped to) a road position with defaults. */
export function placeAp(state: StudioState, at: Point, ssid = "ad-net"): StudioState {
  const snapped = snapToRoad(at, state.draft.road);
  const sizeTemplate = state.draft.aps.find((ap) => ap.ssid === ssid);
  const ap = {
    id: state.nextApId,
    position: snapped.point,
    ssid,
    bssid: bssidFor(state.nextApId),
    interval_ms: sizeTemplate?.interval_ms ?? DEFAULT_INTERVAL_MS,
    range_m: sizeTemplate?.range_m ?? DEFAULT_RANGE_M,
    loss_p: sizeTemplate?.loss_p ?? 0.05,
    size_bytes: sizeTemplate?.size_bytes ?? 16384,
  };
  return {
    ...state,
    nextApId: state.nextApId + 1,
    draft: { ...state.draft, aps: [...state.draft.aps, ap] },
  };
}

export function moveAp(state: StudioState, apId: number, to: Point): StudioState {
  const snapped = snapToRoad(to, state.draft.road);
  return {
    ...state,
    draft: {
      ...state.draft,
      aps: state.draft.aps.map((ap) =>
        ap.id === apId ? { ...ap, position: snapped.point } : ap,
      ),
    },
  };
}

export function updateAp(
  state: StudioState,
  apId: number,
  patch: Partial<Omit<StudioState["draft"]["aps"][number], "id">>,
): StudioState {
  return {
    ...state,
    draft: {
      ...state.draft,
      aps: state.draft.aps.map((ap) => (ap.id === apId ? { ...ap, ...patch } : ap)),
    },
  };
}

export function removeAp(state: StudioState, apId: number): StudioState {
  return {
    ...state,
    draft: { ...state.draft, aps: state.draft.aps.filter((ap) => ap.id !== apId) },
  };
}

export function updateDraft(state: StudioState, patch: Partial<Draft>): StudioState {
  return { ...state, draft: { ...state.draft, ...patch } };
}

export function badges(state: StudioState): Badge[] {
  return validateDraft(state.draft);
}

export function currentDigest(state: StudioState): string {
  return draftDigest(state.draft);
}

/** Snapshot a finished run onto the board; metrics verbatim from the API. */
export function pinResult(state: StudioState, runId: string, result: RunResultDoc): StudioState {
  const sizes = [...new Set(result.per_ap.map((ap) => ap.message_size_bytes))];
  const label =
    `${result.per_ap.length} AP ` +
    sizes.map((s) => `${Math.round(s / 1024)}K`).join("/") +
    ` seed ${result.seed}`;
  const pin: Pin = {
    digest: result.scenario_digest,
    label,
    messageLossPct: { ...result.aggregate.message_loss_pct },
    vehicleCount: result.aggregate.vehicle_count,
    framesReceivedPerCar: result.aggregate.frames_received_per_car,
    runId,
    result,
  };
  if (state.pins.some((p) => p.digest === pin.digest)) return state;
  return { ...state, pins: [...state.pins, pin] };
}

export function removePin(state: StudioState, digest: string): StudioState {
  return { ...state, pins: state.pins.filter((p) => p.digest !== digest) };
}
