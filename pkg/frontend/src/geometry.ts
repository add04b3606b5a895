/** Road geometry for the editor: snapping, coverage spans, band merging. */

import type { Point } from "./types.js";

export interface Snapped {
  point: Point;
  arcLen: number;
  distance: number;
}

function segLen(a: Point, b: Point): number {
  return Math.hypot(b[0] - a[0], b[1] - a[1]);
}

export function roadLength(polyline: Point[]): number {
  let total = 0;
  for (let i = 0; i + 1 < polyline.length; i++) total += segLen(polyline[i], polyline[i + 1]);
  return total;
}

/** Closest point on the polyline, with its arc-length coordinate. */
export function snapToRoad(p: Point, polyline: Point[]): Snapped {
  let best: Snapped = { point: polyline[0], arcLen: 0, distance: segLen(p, polyline[0]) };
  let cum = 0;
  for (let i = 0; i + 1 < polyline.length; i++) {
    const [ax, ay] = polyline[i];
    const [bx, by] = polyline[i + 1];
    const dx = bx - ax;
    const dy = by - ay;
    const len2 = dx * dx + dy * dy;
    let t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / len2;
    t = Math.max(0, Math.min(1, t));
    const q: Point = [ax + t * dx, ay + t * dy];
    const d = segLen(p, q);
    const L = Math.sqrt(len2);
    if (d < best.distance) best = { point: q, arcLen: cum + t * L, distance: d };
    cum += L;
  }
  return best;
}

/** Point at a given arc length (clamped to the road's ends). */
export function pointAtArcLen(s: number, polyline: Point[]): Point {
  if (s <= 0) return polyline[0];
  let cum = 0;
  for (let i = 0; i + 1 < polyline.length; i++) {
    const L = segLen(polyline[i], polyline[i + 1]);
    if (s <= cum + L) {
      const t = (s - cum) / L;
      const [ax, ay] = polyline[i];
      const [bx, by] = polyline[i + 1];
      return [ax + t * (bx - ax), ay + t * (by - ay)];
    }
    cum += L;
  }
  return polyline[polyline.length - 1];
}

export interface Span {
  start: number;
  end: number;
}

/** Arc-length ranges of the road inside a transmitter's range disk. */
export function coverageSpans(
  center: Point,
  rangeM: number,
  polyline: Point[],
): Span[] {
  const spans: Span[] = [];
  let cum = 0;
  for (let i = 0; i + 1 < polyline.length; i++) {
    const [ax, ay] = polyline[i];
    const [bx, by] = polyline[i + 1];
    const L = segLen(polyline[i], polyline[i + 1]);
    const ux = (bx - ax) / L;
    const uy = (by - ay) / L;
    const rx = ax - center[0];
    const ry = ay - center[1];
    // |r + u*s|^2 = R^2 along s in [0, L]
    const b = 2 * (rx * ux + ry * uy);
    const c = rx * rx + ry * ry - rangeM * rangeM;
    const disc = b * b - 4 * c;
    if (disc >= 0) {
      const sq = Math.sqrt(disc);
      const lo = Math.max(0, (-b - sq) / 2);
      const hi = Math.min(L, (-b + sq) / 2);
      if (lo <= hi) spans.push({ start: cum + lo, end: cum + hi });
    }
    cum += L;
  }
  return mergeSpans(spans);
}

export function mergeSpans(spans: Span[]): Span[] {
  const sorted = [...spans].sort((a, b) => a.start - b.start);
  const out: Span[] = [];
  for (const s of sorted) {
    const last = out[out.length - 1];
    if (last && s.start <= last.end) last.end = Math.max(last.end, s.end);
    else out.push({ ...s });
  }
  return out;
}

export interface NetworkBand {
  ssid: string;
  spans: Span[];
  gapFree: boolean;
}

/** Per-network coverage bands; gap-free when one contiguous span remains. */
export function networkBands(
  aps: Array<{ ssid: string; position: Point; range_m: number }>,
  polyline: Point[],
): NetworkBand[] {
  const bySsid = new Map<string, Span[]>();
  for (const ap of aps) {
    const spans = coverageSpans(ap.position, ap.range_m, polyline);
    bySsid.set(ap.ssid, [...(bySsid.get(ap.ssid) ?? []), ...spans]);
  }
  return [...bySsid.entries()].map(([ssid, spans]) => {
    const merged = mergeSpans(spans);
    return { ssid, spans: merged, gapFree: merged.length === 1 };
  });
}
