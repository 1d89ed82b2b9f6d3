// DOM wiring: one socket, one state mirror, one canvas, one event feed.

import "./style.css";

import { allows, edgeClickCommand, nodeClickCommand, setAutonomyCommand,
         takeControlCommand } from "./commands";
import type { ServerFrame } from "./protocol";
import { drawScene, fitView, GridLayer, hitTest, Selection } from "./render";
import { buildScene, defaultLayers } from "./scene";
import { MissionSocket } from "./socket";
import { applyFrame, initialState } from "./state";
import { TeleopController } from "./teleop";
import { Timeline } from "./timeline";

const LEVEL_NAMES: Record<number, string> = {
  1: "L1 autonomous",
  2: "L2 assign jobs",
  3: "L3 trigger behaviors",
  4: "L4 teleoperate",
};

const LEVEL_HINTS: Record<number, string> = {
  1: "the mission explores, plans, and acts on its own",
  2: "click a frontier or waypoint to assign the next job",
  3: "click an edge at the robot's node to run that behavior",
  4: "drive with WASD or the arrow keys",
};

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

const canvas = el<HTMLCanvasElement>("map");
const ctx = canvas.getContext("2d")!;
const state = initialState();
const layers = defaultLayers();
const grid = new GridLayer();
let selection: Selection | null = null;
let dirty = true;
let feedDirty = true;
let resyncing = false;

const params = new URLSearchParams(location.search);
const wsUrl =
  params.get("server")
  ?? `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;

const timeline = new Timeline((edgeId) => {
  const edge = state.edges.get(edgeId);
  return edge
    ? { behavior: edge.behavior, object_params: edge.object_params }
    : undefined;
});

const socket = new MissionSocket(wsUrl, onFrame, (connected) => {
  state.connected = connected;
  dirty = true;
});

const teleop = new TeleopController(
  (cmd) => socket.send(cmd),
  () => state.level,
);

function onFrame(frame: ServerFrame): void {
  applyFrame(state, frame);
  switch (frame.type) {
    case "snapshot":
      resyncing = false;
      selection = null;
      feedDirty = true;
      break;
    case "event":
      if (timeline.pushEvent(frame)) feedDirty = true;
      break;
    case "plan":
      if (timeline.pushPlan(frame)) feedDirty = true;
      break;
    case "error":
      timeline.pushError(frame);
      feedDirty = true;
      break;
  }
  if (state.desynced && !resyncing) {
    resyncing = true;
    socket.reconnect(); // the fresh snapshot on reattach resynchronizes
  }
  dirty = true;
}

// -- status bar ---------------------------------------------------------

function renderStatus(): void {
  const conn = el("conn");
  conn.textContent = state.connected ? "live" : "offline";
  conn.className = `badge ${state.connected ? "ok" : "err"}`;
  el("desync").classList.toggle("hidden", !state.desynced);
  el("paused").classList.toggle("hidden", !state.paused);
  el("complete").classList.toggle("hidden", !state.complete);
  el("step").textContent = `step ${state.step} · rev ${state.revision}`;
}

// -- sidebar controls ---------------------------------------------------

function buildControls(): void {
  const holder = el("levels");
  for (let level = 1; level <= 4; level++) {
    const button = document.createElement("button");
    button.textContent = LEVEL_NAMES[level];
    button.dataset.level = String(level);
    button.addEventListener("click", () => socket.send(setAutonomyCommand(level)));
    holder.appendChild(button);
  }
  el("pause").addEventListener("click", () => socket.send({ type: "pause" }));
  el("resume").addEventListener("click", () => socket.send({ type: "resume" }));

  const toggles = el("layer-toggles");
  for (const name of Object.keys(layers) as (keyof typeof layers)[]) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = layers[name];
    box.addEventListener("change", () => {
      layers[name] = box.checked;
      dirty = true;
    });
    label.append(box, ` ${name}`);
    toggles.appendChild(label);
  }
}

function renderControls(): void {
  for (const button of el("levels").querySelectorAll("button")) {
    button.classList.toggle("active", Number(button.dataset.level) === state.level);
  }
  el("hint").textContent = LEVEL_HINTS[state.level] ?? "";
}

// -- selection and legend ------------------------------------------------

function renderSelection(): void {
  const info = el("sel-info");
  if (!selection) {
    info.textContent = "nothing selected";
    return;
  }
  if (selection.kind === "node") {
    const node = state.nodes.get(selection.id);
    info.textContent = node
      ? `node ${node.id} · ${node.kind}\n(${node.pose.x.toFixed(2)}, `
        + `${node.pose.y.toFixed(2)})\nobjects: `
        + (node.objects.map((o) => o.id).join(" ") || "none")
      : `node ${selection.id} (removed)`;
    return;
  }
  const edge = state.edges.get(selection.id);
  info.textContent = edge
    ? `edge ${edge.id} · ${edge.behavior}`
      + (edge.object_params.length ? ` ${edge.object_params.join(" ")}` : "")
      + `\n${edge.source} → ${edge.target} · cost ${edge.cost.toFixed(2)}`
    : `edge ${selection.id} (removed)`;
}

function renderLegend(red: number, green: number, blue: number): void {
  el("count-red").textContent = String(red);
  el("count-green").textContent = String(green);
  el("count-blue").textContent = String(blue);
}

// -- alerts and feed -----------------------------------------------------

function renderFeed(): void {
  const alerts = el("alerts");
  alerts.replaceChildren();
  for (const row of timeline.pinned) {
    const box = document.createElement("div");
    box.className = "alert";
    const text = document.createElement("span");
    text.textContent = row.summary;
    box.appendChild(text);
    if (state.level !== 4) {
      const take = document.createElement("button");
      take.textContent = "take control";
      take.addEventListener("click", () => {
        socket.send(takeControlCommand());
        timeline.acknowledge(row.id);
        feedDirty = true;
        dirty = true;
      });
      box.appendChild(take);
    }
    const dismiss = document.createElement("button");
    dismiss.textContent = "dismiss";
    dismiss.addEventListener("click", () => {
      timeline.acknowledge(row.id);
      feedDirty = true;
      dirty = true;
    });
    box.appendChild(dismiss);
    alerts.appendChild(box);
  }

  const list = el("rows");
  list.replaceChildren();
  for (const row of timeline.rows.slice(0, 120)) {
    const item = document.createElement("li");
    item.textContent = row.summary;
    item.className = row.kind;
    list.appendChild(item);
  }
}

// -- canvas --------------------------------------------------------------

function sizeCanvas(): boolean {
  const rect = canvas.getBoundingClientRect();
  const dpr = window.devicePixelRatio || 1;
  const w = Math.max(1, Math.round(rect.width * dpr));
  const h = Math.max(1, Math.round(rect.height * dpr));
  if (canvas.width !== w || canvas.height !== h) {
    canvas.width = w;
    canvas.height = h;
    return true;
  }
  return false;
}

let lastView = fitView(state, 1, 1);

function renderFrame(): void {
  sizeCanvas();
  const scene = buildScene(state, layers);
  lastView = fitView(state, canvas.width, canvas.height);
  drawScene(ctx, state, scene, layers, lastView, grid, selection);
  renderLegend(scene.counts.red, scene.counts.green, scene.counts.blue);
  renderStatus();
  renderControls();
  renderSelection();
  if (feedDirty) {
    renderFeed();
    feedDirty = false;
  }
}

canvas.addEventListener("click", (event) => {
  const rect = canvas.getBoundingClientRect();
  const px = ((event.clientX - rect.left) / rect.width) * canvas.width;
  const py = ((event.clientY - rect.top) / rect.height) * canvas.height;
  selection = hitTest(buildScene(state, layers), lastView, px, py);
  if (selection?.kind === "node") {
    const cmd = nodeClickCommand(state, selection.id);
    if (cmd) socket.send(cmd);
  } else if (selection?.kind === "edge") {
    const cmd = edgeClickCommand(state, selection.id);
    if (cmd) socket.send(cmd);
  }
  dirty = true;
});

window.addEventListener("keydown", (event) => {
  if (event.repeat) return; // the ticker handles the hold
  if (teleop.keyDown(event.key)) event.preventDefault();
});

window.addEventListener("keyup", (event) => {
  const wasActive = teleop.active;
  teleop.keyUp(event.key);
  if (wasActive && !teleop.active && allows(state.level, "teleop")) {
    socket.send({ type: "teleop", vx: 0, vy: 0, wz: 0 }); // halt on release
  }
});

window.addEventListener("resize", () => {
  dirty = true;
});

function loop(): void {
  if (dirty) {
    dirty = false;
    renderFrame();
  }
  requestAnimationFrame(loop);
}

buildControls();
socket.open();
requestAnimationFrame(loop);
