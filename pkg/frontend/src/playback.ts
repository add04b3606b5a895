/** Playback helpers: vehicle motion and frame flashes from a run result.
 *
 * The client animates from the result's per-vehicle spawn/speed columns
 * and the strided event feed; positions reuse the same constant-speed
 * arc-length rule the simulator applies.
 */

import { pointAtArcLen, roadLength } from "./geometry.js";
import type { FrameEventDoc, Point, RunResultDoc } from "./types.js";

export interface VehicleDot {
  id: number;
  point: Point;
}

export function vehiclePositionAt(
  spawnS: number,
  speedMps: number,
  polyline: Point[],
  t: number,
): Point | null {
  if (t < spawnS) return null;
  const s = (t - spawnS) * speedMps;
  if (s > roadLength(polyline)) return null;
  return pointAtArcLen(s, polyline);
}

export function vehicleDotsAt(
  result: RunResultDoc,
  polyline: Point[],
  t: number,
): VehicleDot[] {
  const dots: VehicleDot[] = [];
  for (const v of result.per_vehicle) {
    const p = vehiclePositionAt(v.spawn_time_s, v.speed_mps, polyline, t);
    if (p) dots.push({ id: v.id, point: p });
  }
  return dots;
}

/** Events within the trailing window before t (for short-lived flashes). */
export function recentEvents(
  events: FrameEventDoc[],
  t: number,
  windowS: number,
): FrameEventDoc[] {
  return events.filter((e) => e.time_s <= t && e.time_s > t - windowS);
}

export function playbackSpan(result: RunResultDoc): { start: number; end: number } {
  return { start: 0, end: result.duration_s };
}
