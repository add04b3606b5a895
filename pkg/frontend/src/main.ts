/** DOM wiring for the studio: canvas editing, runs, pin board, playback. */

import { ApiClient, ApiError } from "./api.js";
import { badges, currentDigest, initialState, moveAp, pinResult, placeAp, removeAp, StudioState, updateAp, updateDraft } from "./state.js";
import { serializeDraft, toScenarioDoc } from "./schema.js";
import { drawScene, fitViewport, toWorld } from "./render.js";
import { recentEvents, vehicleDotsAt } from "./playback.js";
import type { FrameEventDoc, RunResultDoc } from "./types.js";

const api = new ApiClient("");
let state: StudioState = initialState();
let selectedApId: number | null = null;
let playback: {
  result: RunResultDoc;
  events: FrameEventDoc[];
  t: number;
  playing: boolean;
} | null = null;

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const badgesEl = document.getElementById("badges")!;
const pinsEl = document.getElementById("pins")!;
const apFormEl = document.getElementById("ap-form")!;

function setStatus(text: string, isError = false) {
  statusEl.textContent = text;
  statusEl.className = isError ? "error" : "";
}

function redraw() {
  const vp = fitViewport(state.draft, canvas.width, canvas.height);
  const layers =
    playback !== null
      ? {
          vehicles: vehicleDotsAt(playback.result, state.draft.road, playback.t),
          flashes: recentEvents(playback.events, playback.t, 0.4),
        }
      : {};
  drawScene(ctx, state.draft, vp, { selectedApId, ...layers });
  renderBadges();
  renderApForm();
}

function renderBadges() {
  const list = badges(state);
  badgesEl.innerHTML = "";
  for (const b of list) {
    const li = document.createElement("li");
    li.textContent = `${b.field}: ${b.message}`;
    badgesEl.appendChild(li);
  }
  (document.getElementById("run-btn") as HTMLButtonElement).disabled = list.length > 0;
}

function bindNumber(input: HTMLInputElement, value: number, apply: (v: number) => void) {
  input.value = String(value);
  input.onchange = () => {
    const v = Number(input.value);
    if (Number.isFinite(v)) apply(v);
    redraw();
  };
}

function renderApForm() {
  apFormEl.innerHTML = "";
  const ap = state.draft.aps.find((a) => a.id === selectedApId);
  if (!ap) {
    apFormEl.textContent = "click the road to place a transmitter; drag to move";
    return;
  }
  const row = (label: string, el: HTMLElement) => {
    const div = document.createElement("div");
    const span = document.createElement("label");
    span.textContent = label;
    div.append(span, el);
    apFormEl.appendChild(div);
  };
  const ssid = document.createElement("input");
  ssid.value = ap.ssid;
  ssid.onchange = () => {
    state = updateAp(state, ap.id, { ssid: ssid.value });
    redraw();
  };
  row("network name", ssid);
  const mk = (value: number, apply: (v: number) => void) => {
    const input = document.createElement("input");
    input.type = "number";
    bindNumber(input, value, apply);
    return input;
  };
  row("range (m)", mk(ap.range_m, (v) => (state = updateAp(state, ap.id, { range_m: v }))));
  row("interval (ms)", mk(ap.interval_ms, (v) => (state = updateAp(state, ap.id, { interval_ms: v }))));
  row("loss prob", mk(ap.loss_p, (v) => (state = updateAp(state, ap.id, { loss_p: v }))));
  row(
    "message (KB)",
    mk(ap.size_bytes / 1024, (v) => (state = updateAp(state, ap.id, { size_bytes: Math.round(v * 1024) }))),
  );
  const del = document.createElement("button");
  del.textContent = "remove transmitter";
  del.onclick = () => {
    state = removeAp(state, ap.id);
    selectedApId = null;
    redraw();
  };
  apFormEl.appendChild(del);
}

function renderPins() {
  pinsEl.innerHTML = "";
  for (const pin of state.pins) {
    const tr = document.createElement("tr");
    const losses = Object.entries(pin.messageLossPct)
      .map(([net, pct]) => `${net}: ${pct.toFixed(1)}%`)
      .join("  ");
    tr.innerHTML =
      `<td>${pin.digest.slice(0, 8)}</td><td>${pin.label}</td>` +
      `<td>${losses}</td><td>${pin.vehicleCount}</td>` +
      `<td>${pin.framesReceivedPerCar.toFixed(1)}</td>`;
    const td = document.createElement("td");
    const play = document.createElement("button");
    play.textContent = "play";
    play.onclick = () => startPlayback(pin.runId, pin.result);
    td.appendChild(play);
    tr.appendChild(td);
    pinsEl.appendChild(tr);
  }
}

async function runAndPin() {
  const doc = toScenarioDoc(state.draft);
  const digest = currentDigest(state);
  setStatus(`submitting draft ${digest}…`);
  try {
    const runId = await api.submitRun(doc);
    state = { ...state, runs: [...state.runs, { runId, digest, status: "QUEUED" }] };
    setStatus(`run ${runId.slice(0, 8)} queued; waiting…`);
    const handle = await api.pollRun(runId);
    state = pinResult(state, runId, handle.result!);
    renderPins();
    const pct = Object.entries(handle.result!.aggregate.message_loss_pct)
      .map(([net, v]) => `${net} ${v.toFixed(1)}%`)
      .join(", ");
    setStatus(`run ${runId.slice(0, 8)} done — message loss ${pct}`);
  } catch (e) {
    if (e instanceof ApiError) {
      const field = e.field ? ` (${e.field})` : "";
      setStatus(`service rejected the run: ${e.message}${field} — fix and retry`, true);
    } else {
      setStatus(`service unreachable: ${e} — is \`beaconcast serve\` running?`, true);
    }
  }
}

async function startPlayback(runId: string, result: RunResultDoc) {
  try {
    const total = (await api.getEvents(runId, 1)).total_events;
    const stride = Math.max(1, Math.floor(total / 4000));
    const doc = await api.getEvents(runId, stride);
    playback = { result, events: doc.events, t: 0, playing: true };
    setStatus(`playback: ${doc.events.length} sampled events (stride ${stride})`);
  } catch (e) {
    setStatus(`cannot load events: ${e}`, true);
  }
}

function tick() {
  if (playback?.playing) {
    playback.t += 0.25;
    if (playback.t > playback.result.duration_s) playback.t = 0;
    redraw();
  }
  requestAnimationFrame(tick);
}

function canvasPoint(ev: MouseEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  const vp = fitViewport(state.draft, canvas.width, canvas.height);
  return toWorld([ev.clientX - rect.left, ev.clientY - rect.top], vp);
}

let dragging: number | null = null;

canvas.addEventListener("mousedown", (ev) => {
  const [wx, wy] = canvasPoint(ev);
  const hit = state.draft.aps.find(
    (ap) => Math.hypot(ap.position[0] - wx, ap.position[1] - wy) < 25,
  );
  if (hit) {
    selectedApId = hit.id;
    dragging = hit.id;
  } else {
    state = placeAp(state, [wx, wy], (document.getElementById("ssid-input") as HTMLInputElement).value || "ad-net");
    selectedApId = state.draft.aps[state.draft.aps.length - 1].id;
  }
  redraw();
});
canvas.addEventListener("mousemove", (ev) => {
  if (dragging !== null) {
    state = moveAp(state, dragging, canvasPoint(ev));
    redraw();
  }
});
canvas.addEventListener("mouseup", () => (dragging = null));

document.getElementById("run-btn")!.addEventListener("click", runAndPin);
document.getElementById("pause-btn")!.addEventListener("click", () => {
  if (playback) playback.playing = !playback.playing;
});
document.getElementById("export-btn")!.addEventListener("click", () => {
  const blob = new Blob([serializeDraft(state.draft)], { type: "application/json" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "scenario.json";
  a.click();
});

for (const [id, apply] of [
  ["seed-input", (v: number) => (state = updateDraft(state, { seed: v }))],
  ["count-input", (v: number) => (state = updateDraft(state, { traffic: { ...state.draft.traffic, count: v } }))],
  ["duration-input", (v: number) => (state = updateDraft(state, { duration_s: v }))],
] as const) {
  const input = document.getElementById(id) as HTMLInputElement;
  input.onchange = () => {
    const v = Number(input.value);
    if (Number.isFinite(v)) apply(v);
    redraw();
  };
}

api.health().then((ok) =>
  setStatus(ok ? "service reachable — place transmitters and run" : "service unreachable — start `beaconcast serve`", !ok),
);
redraw();
tick();
