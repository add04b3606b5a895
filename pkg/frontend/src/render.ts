/** Canvas rendering: top-down road, range disks, coverage bands, playback. */

import { networkBands, pointAtArcLen, roadLength } from "./geometry.js";
import type { Draft } from "./schema.js";
import type { FrameEventDoc, Point } from "./types.js";
import type { VehicleDot } from "./playback.js";

export interface Viewport {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function fitViewport(draft: Draft, width: number, height: number): Viewport {
  const xs = draft.road.map((p) => p[0]).concat(draft.aps.map((a) => a.position[0]));
  const ys = draft.road.map((p) => p[1]).concat(draft.aps.map((a) => a.position[1]));
  const pad = Math.max(...draft.aps.map((a) => a.range_m), 120);
  const minX = Math.min(...xs) - pad;
  const maxX = Math.max(...xs) + pad;
  const minY = Math.min(...ys) - pad;
  const maxY = Math.max(...ys) + pad;
  const scale = Math.min(width / (maxX - minX), height / (maxY - minY));
  return {
    scale,
    offsetX: (width - (maxX + minX) * scale) / 2,
    offsetY: (height - (maxY + minY) * scale) / 2,
  };
}

export function toScreen(p: Point, vp: Viewport): Point {
  return [p[0] * vp.scale + vp.offsetX, p[1] * vp.scale + vp.offsetY];
}

export function toWorld(p: Point, vp: Viewport): Point {
  return [(p[0] - vp.offsetX) / vp.scale, (p[1] - vp.offsetY) / vp.scale];
}

const NET_COLORS = ["#2a9d8f", "#e76f51", "#6d597a", "#457b9d", "#b5838d"];

export function networkColor(ssid: string, networks: string[]): string {
  const i = Math.max(0, networks.indexOf(ssid));
  return NET_COLORS[i % NET_COLORS.length];
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  draft: Draft,
  vp: Viewport,
  opts: {
    selectedApId?: number | null;
    vehicles?: VehicleDot[];
    flashes?: FrameEventDoc[];
  } = {},
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);

  const networks = [...new Set(draft.aps.map((a) => a.ssid))];

  // Range disks first, translucent.
  for (const ap of draft.aps) {
    const [cx, cy] = toScreen(ap.position, vp);
    ctx.beginPath();
    ctx.arc(cx, cy, ap.range_m * vp.scale, 0, Math.PI * 2);
    ctx.fillStyle = networkColor(ap.ssid, networks) + "22";
    ctx.fill();
    ctx.strokeStyle = networkColor(ap.ssid, networks) + "88";
    ctx.stroke();
  }

  // Road.
  ctx.beginPath();
  const [sx, sy] = toScreen(draft.road[0], vp);
  ctx.moveTo(sx, sy);
  for (const p of draft.road.slice(1)) {
    const [x, y] = toScreen(p, vp);
    ctx.lineTo(x, y);
  }
  ctx.lineWidth = 5;
  ctx.strokeStyle = "#444";
  ctx.stroke();
  ctx.lineWidth = 1;

  // Contiguous coverage bands along the road, per network.
  const bands = networkBands(draft.aps, draft.road);
  for (const band of bands) {
    ctx.lineWidth = 9;
    ctx.strokeStyle = networkColor(band.ssid, networks) + (band.gapFree ? "66" : "33");
    for (const span of band.spans) {
      ctx.beginPath();
      const steps = 24;
      for (let i = 0; i <= steps; i++) {
        const s = span.start + ((span.end - span.start) * i) / steps;
        const [x, y] = toScreen(pointAtArcLen(s, draft.road), vp);
        if (i === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      }
      ctx.stroke();
    }
  }
  ctx.lineWidth = 1;

  // Transmitters.
  for (const ap of draft.aps) {
    const [cx, cy] = toScreen(ap.position, vp);
    ctx.beginPath();
    ctx.arc(cx, cy, 7, 0, Math.PI * 2);
    ctx.fillStyle = networkColor(ap.ssid, networks);
    ctx.fill();
    if (opts.selectedApId === ap.id) {
      ctx.beginPath();
      ctx.arc(cx, cy, 11, 0, Math.PI * 2);
      ctx.strokeStyle = "#111";
      ctx.stroke();
    }
    ctx.fillStyle = "#222";
    ctx.font = "11px system-ui";
    ctx.fillText(ap.ssid, cx + 10, cy - 8);
  }

  // Playback layers.
  for (const dot of opts.vehicles ?? []) {
    const [x, y] = toScreen(dot.point, vp);
    ctx.beginPath();
    ctx.arc(x, y, 4, 0, Math.PI * 2);
    ctx.fillStyle = "#1d3557";
    ctx.fill();
  }
  for (const ev of opts.flashes ?? []) {
    const ap = draft.aps[ev.ap_index];
    if (!ap) continue;
    const [x, y] = toScreen(ap.position, vp);
    ctx.beginPath();
    ctx.arc(x, y, 14, 0, Math.PI * 2);
    ctx.strokeStyle = ev.delivered ? "#2a9d8f" : "#e63946";
    ctx.stroke();
  }

  const total = roadLength(draft.road);
  ctx.fillStyle = "#666";
  ctx.font = "12px system-ui";
  ctx.fillText(`road ${total.toFixed(0)} m`, 10, height - 10);
}
