/** Draft model, client-side validation, and lossless serialization.
 *
 * Drafts are validated against the same rules the run service enforces,
 * so a draft without badges is guaranteed to submit cleanly. Serialized
 * documents use canonical form (sorted keys, compact separators) so that
 * equal drafts produce byte-equal documents.
 */

import type { ApDoc, Point, ScenarioDoc } from "./types.js";

export interface ApDraft {
  id: number;
  position: Point;
  ssid: string;
  bssid: string;
  interval_ms: number;
  range_m: number;
  loss_p: number;
  size_bytes: number;
  topic?: string;
}

export interface Draft {
  seed: number;
  duration_s: number;
  policy: "accumulate" | "strict";
  road: Point[];
  traffic: {
    count: number;
    headway_s: number;
    speed_kmh_min: number;
    speed_kmh_max: number;
  };
  aps: ApDraft[];
}

export interface Badge {
  field: string;
  message: string;
}

export const DEFAULT_RANGE_M = 90;
export const DEFAULT_INTERVAL_MS = 10;

export function defaultDraft(): Draft {
  return {
    seed: 42,
    duration_s: 240,
    policy: "accumulate",
    road: [
      [0, 0],
      [1200, 0],
    ],
    traffic: { count: 60, headway_s: 3, speed_kmh_min: 60, speed_kmh_max: 70 },
    aps: [],
  };
}

export function byteLength(s: string): number {
  return new TextEncoder().encode(s).length;
}

export function validateDraft(draft: Draft): Badge[] {
  const badges: Badge[] = [];
  if (draft.duration_s <= 0) badges.push({ field: "duration_s", message: "must be positive" });
  if (draft.road.length < 2) badges.push({ field: "road", message: "needs at least 2 points" });
  if (!Number.isInteger(draft.seed) || draft.seed < 0)
    badges.push({ field: "seed", message: "must be a non-negative integer" });
  if (draft.traffic.count < 1)
    badges.push({ field: "traffic.count", message: "must be >= 1" });
  if (draft.traffic.headway_s <= 0)
    badges.push({ field: "traffic.headway_s", message: "must be positive" });
  if (
    draft.traffic.speed_kmh_min <= 0 ||
    draft.traffic.speed_kmh_min > draft.traffic.speed_kmh_max
  )
    badges.push({ field: "traffic.speed_kmh_min", message: "band must be 0 < min <= max" });
  if (draft.aps.length === 0)
    badges.push({ field: "aps", message: "place at least one access point" });

  const seenBssid = new Map<string, number>();
  draft.aps.forEach((ap, i) => {
    const where = `aps[${i}]`;
    if (!ap.ssid) badges.push({ field: `${where}.ssid`, message: "must be non-empty" });
    else if (byteLength(ap.ssid) > 32)
      badges.push({ field: `${where}.ssid`, message: "exceeds 32 bytes" });
    if (!/^([0-9a-f]{2}:){5}[0-9a-f]{2}$/i.test(ap.bssid))
      badges.push({ field: `${where}.bssid`, message: "must look like aa:bb:cc:dd:ee:ff" });
    else {
      const key = ap.bssid.toLowerCase();
      const prior = seenBssid.get(key);
      if (prior !== undefined)
        badges.push({
          field: `${where}.bssid`,
          message: `duplicates aps[${prior}] — transmitters need distinct ids`,
        });
      else seenBssid.set(key, i);
    }
    if (ap.interval_ms < 1 || ap.interval_ms > 65535 || !Number.isInteger(ap.interval_ms))
      badges.push({ field: `${where}.interval_ms`, message: "must be an integer in 1..65535" });
    if (ap.range_m <= 0) badges.push({ field: `${where}.range_m`, message: "must be positive" });
    if (ap.loss_p < 0 || ap.loss_p > 1)
      badges.push({ field: `${where}.loss_p`, message: "must be within [0, 1]" });
    if (ap.size_bytes < 1 || ap.size_bytes > 16_384_000)
      badges.push({ field: `${where}.size_bytes`, message: "must be in 1..16,384,000" });
  });

  // Same-name transmitters must advertise the same message.
  const sizeBySsid = new Map<string, { size: number; index: number }>();
  draft.aps.forEach((ap, i) => {
    const prior = sizeBySsid.get(ap.ssid);
    if (prior && prior.size !== ap.size_bytes)
      badges.push({
        field: `aps[${i}].size_bytes`,
        message: `differs from aps[${prior.index}] sharing ssid "${ap.ssid}"`,
      });
    else if (!prior) sizeBySsid.set(ap.ssid, { size: ap.size_bytes, index: i });
  });
  return badges;
}

export function toScenarioDoc(draft: Draft): ScenarioDoc {
  const aps: ApDoc[] = draft.aps.map((ap) => ({
    position: [ap.position[0], ap.position[1]],
    ssid: ap.ssid,
    bssid: ap.bssid.toLowerCase(),
    schedule: { interval_ms: ap.interval_ms, start_s: 0, end_s: draft.duration_s },
    channel: { range_m: ap.range_m, loss_p: ap.loss_p },
    message: ap.topic ? { size_bytes: ap.size_bytes, topic: ap.topic } : { size_bytes: ap.size_bytes },
  }));
  return {
    schema_version: 1,
    seed: draft.seed,
    duration_s: draft.duration_s,
    reassembly_policy: draft.policy,
    road: { polyline: draft.road.map((p) => [p[0], p[1]]) },
    traffic: {
      kind: "uniform_flow",
      count: draft.traffic.count,
      headway_s: draft.traffic.headway_s,
      speed_kmh_min: draft.traffic.speed_kmh_min,
      speed_kmh_max: draft.traffic.speed_kmh_max,
    },
    aps,
  };
}

/** JSON with recursively sorted keys and compact separators. */
export function canonicalStringify(value: unknown): string {
  const sort = (v: unknown): unknown => {
    if (Array.isArray(v)) return v.map(sort);
    if (v !== null && typeof v === "object") {
      const out: Record<string, unknown> = {};
      for (const k of Object.keys(v as Record<string, unknown>).sort())
        out[k] = sort((v as Record<string, unknown>)[k]);
      return out;
    }
    return v;
  };
  return JSON.stringify(sort(value));
}

export function serializeDraft(draft: Draft): string {
  return canonicalStringify(toScenarioDoc(draft)) + "\n";
}

/** Cheap content fingerprint for change detection on the pin board. */
export function draftDigest(draft: Draft): string {
  const text = serializeDraft(draft);
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h.toString(16).padStart(8, "0");
}
