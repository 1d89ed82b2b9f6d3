// Canvas painting: projects the scene into screen space and draws the
// grid composite, edges, nodes, object markers, and the robot.
// Everything here works in screen pixels through one projection, so no
// canvas transforms are involved.

import type { MissionState } from "./state";
import type { Layers, Scene, SceneEdge } from "./scene";
import { COLORS } from "./scene";
import { decodeCells, FREE, OCCUPIED } from "./rle";

export interface Viewport {
  scale: number; // screen px per meter
  ox: number; // screen x of world x=0
  oy: number; // screen y of world y=0 (world +y points up the screen)
}

export function project(view: Viewport, x: number, y: number): [number, number] {
  return [view.ox + x * view.scale, view.oy - y * view.scale];
}

export function unproject(view: Viewport, px: number, py: number): [number, number] {
  return [(px - view.ox) / view.scale, (view.oy - py) / view.scale];
}

interface Bounds {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

function sceneBounds(state: MissionState): Bounds {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  const grow = (x: number, y: number) => {
    minX = Math.min(minX, x);
    minY = Math.min(minY, y);
    maxX = Math.max(maxX, x);
    maxY = Math.max(maxY, y);
  };
  for (const node of state.nodes.values()) {
    grow(node.pose.x, node.pose.y);
    const g = node.gridmap;
    if (g) {
      grow(g.origin.x, g.origin.y);
      grow(g.origin.x + g.width * g.resolution, g.origin.y + g.height * g.resolution);
    }
  }
  if (state.robot) grow(state.robot.x, state.robot.y);
  if (minX > maxX) return { minX: 0, minY: 0, maxX: 1, maxY: 1 };
  return { minX, minY, maxX, maxY };
}

export function fitView(state: MissionState, width: number, height: number): Viewport {
  const pad = 30;
  const b = sceneBounds(state);
  const dx = Math.max(b.maxX - b.minX, 0.5);
  const dy = Math.max(b.maxY - b.minY, 0.5);
  const scale = Math.min((width - 2 * pad) / dx, (height - 2 * pad) / dy);
  const cx = (b.minX + b.maxX) / 2;
  const cy = (b.minY + b.maxY) / 2;
  return {
    scale,
    ox: width / 2 - cx * scale,
    oy: height / 2 + cy * scale,
  };
}

// The grid composite: all local grids painted once per graph revision into
// an offscreen canvas anchored to world bounds, row 0 at world maxY.
const GRID_PPM = 16; // composite pixels per meter

export class GridLayer {
  private canvas: HTMLCanvasElement | null = null;
  private revision = -1;
  private rect: Bounds = { minX: 0, minY: 0, maxX: 0, maxY: 0 };

  ensure(state: MissionState): void {
    if (state.revision === this.revision) return;
    this.revision = state.revision;
    this.canvas = this.paint(state);
  }

  private paint(state: MissionState): HTMLCanvasElement | null {
    let b: Bounds | null = null;
    for (const node of state.nodes.values()) {
      const g = node.gridmap;
      if (!g || g.width === 0) continue;
      const gx2 = g.origin.x + g.width * g.resolution;
      const gy2 = g.origin.y + g.height * g.resolution;
      if (!b) b = { minX: g.origin.x, minY: g.origin.y, maxX: gx2, maxY: gy2 };
      else {
        b.minX = Math.min(b.minX, g.origin.x);
        b.minY = Math.min(b.minY, g.origin.y);
        b.maxX = Math.max(b.maxX, gx2);
        b.maxY = Math.max(b.maxY, gy2);
      }
    }
    if (!b) return null;
    this.rect = b;
    const canvas = document.createElement("canvas");
    canvas.width = Math.max(1, Math.ceil((b.maxX - b.minX) * GRID_PPM));
    canvas.height = Math.max(1, Math.ceil((b.maxY - b.minY) * GRID_PPM));
    const ctx = canvas.getContext("2d");
    if (!ctx) return null;
    // two passes so one map's FREE never erases a neighbor's wall
    for (const pass of [FREE, OCCUPIED]) {
      ctx.fillStyle = pass === FREE ? "#f4f1ea" : "#4a4a4a";
      for (const node of state.nodes.values()) {
        const g = node.gridmap;
        if (!g || g.width === 0) continue;
        let cells: Uint8Array;
        try {
          cells = decodeCells(g.cells, g.width * g.height);
        } catch (err) {
          console.warn(`grid of node ${node.id} undecodable`, err);
          continue;
        }
        const side = g.resolution * GRID_PPM;
        for (let i = 0; i < cells.length; i++) {
          if (cells[i] !== pass) continue;
          const ix = i % g.width;
          const iy = Math.floor(i / g.width);
          const wx = g.origin.x + ix * g.resolution;
          const wyTop = g.origin.y + (iy + 1) * g.resolution;
          ctx.fillRect(
            (wx - b.minX) * GRID_PPM,
            (b.maxY - wyTop) * GRID_PPM,
            side + 0.5,
            side + 0.5,
          );
        }
      }
    }
    return canvas;
  }

  draw(ctx: CanvasRenderingContext2D, view: Viewport): void {
    if (!this.canvas) return;
    const [px, py] = project(view, this.rect.minX, this.rect.maxY);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(
      this.canvas,
      px,
      py,
      (this.rect.maxX - this.rect.minX) * view.scale,
      (this.rect.maxY - this.rect.minY) * view.scale,
    );
  }
}

export interface Selection {
  kind: "node" | "edge";
  id: number;
}

function drawArrowhead(
  ctx: CanvasRenderingContext2D,
  x: number,
  y: number,
  angle: number,
  size: number,
): void {
  ctx.beginPath();
  ctx.moveTo(x, y);
  ctx.lineTo(x - size * Math.cos(angle - 0.5), y - size * Math.sin(angle - 0.5));
  ctx.lineTo(x - size * Math.cos(angle + 0.5), y - size * Math.sin(angle + 0.5));
  ctx.closePath();
  ctx.fill();
}

function drawEdge(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  edge: SceneEdge,
  selected: boolean,
): void {
  const [x1, y1] = project(view, edge.x1, edge.y1);
  const [x2, y2] = project(view, edge.x2, edge.y2);
  if (edge.planned) {
    ctx.strokeStyle = COLORS.plan;
    ctx.lineWidth = 6;
    ctx.beginPath();
    if (edge.selfLoop) ctx.arc(x1 + 10, y1 - 10, 9, 0, Math.PI * 2);
    else {
      ctx.moveTo(x1, y1);
      ctx.lineTo(x2, y2);
    }
    ctx.stroke();
  }
  ctx.strokeStyle = edge.color;
  ctx.lineWidth = selected ? 3.5 : 1.8;
  ctx.beginPath();
  if (edge.selfLoop) {
    ctx.arc(x1 + 10, y1 - 10, 8, 0, Math.PI * 2);
    ctx.stroke();
    if (edge.arrow) {
      ctx.fillStyle = edge.color;
      drawArrowhead(ctx, x1 + 10, y1 - 18, 0, 7);
    }
    return;
  }
  ctx.moveTo(x1, y1);
  ctx.lineTo(x2, y2);
  ctx.stroke();
  if (edge.arrow) {
    const angle = Math.atan2(y2 - y1, x2 - x1);
    ctx.fillStyle = edge.color;
    drawArrowhead(ctx, (x1 + x2) / 2, (y1 + y2) / 2, angle, 8);
  }
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  state: MissionState,
  scene: Scene,
  layers: Layers,
  view: Viewport,
  grid: GridLayer,
  selection: Selection | null,
): void {
  const { width, height } = ctx.canvas;
  ctx.fillStyle = "#22262b";
  ctx.fillRect(0, 0, width, height);

  if (layers.grid) {
    grid.ensure(state);
    grid.draw(ctx, view);
  }

  for (const edge of scene.edges) {
    const selected = selection?.kind === "edge" && selection.id === edge.id;
    drawEdge(ctx, view, edge, selected);
  }

  for (const obj of scene.objects) {
    const [x, y] = project(view, obj.x, obj.y);
    ctx.strokeStyle = obj.color;
    ctx.lineWidth = 1;
    for (const from of obj.seenFrom) {
      const [fx, fy] = project(view, from.x, from.y);
      ctx.setLineDash([3, 4]);
      ctx.beginPath();
      ctx.moveTo(fx, fy);
      ctx.lineTo(x, y);
      ctx.stroke();
      ctx.setLineDash([]);
    }
    ctx.fillStyle = obj.color;
    ctx.beginPath();
    ctx.moveTo(x, y - 7);
    ctx.lineTo(x + 7, y);
    ctx.lineTo(x, y + 7);
    ctx.lineTo(x - 7, y);
    ctx.closePath();
    ctx.fill();
    ctx.fillStyle = "#e8e8e8";
    ctx.font = "11px sans-serif";
    const tag = obj.state ? `${obj.label} ${obj.state}` : obj.label;
    ctx.fillText(tag, x + 9, y - 9);
  }

  for (const node of scene.nodes) {
    const [x, y] = project(view, node.x, node.y);
    const selected = selection?.kind === "node" && selection.id === node.id;
    ctx.fillStyle = node.color;
    ctx.beginPath();
    ctx.arc(x, y, node.kind === "frontier" ? 7 : 5.5, 0, Math.PI * 2);
    ctx.fill();
    if (selected || (layers.plan && state.planGoal === node.id)) {
      ctx.strokeStyle = selected ? "#ffffff" : COLORS.plan;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(x, y, 10, 0, Math.PI * 2);
      ctx.stroke();
    }
  }

  if (state.robot) {
    const [x, y] = project(view, state.robot.x, state.robot.y);
    const theta = state.robot.theta;
    ctx.fillStyle = "#ffffff";
    ctx.strokeStyle = "#101010";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    // screen angle flips with the y axis
    const tip = [x + 9 * Math.cos(-theta), y + 9 * Math.sin(-theta)];
    const l = [x + 7 * Math.cos(-theta + 2.5), y + 7 * Math.sin(-theta + 2.5)];
    const r = [x + 7 * Math.cos(-theta - 2.5), y + 7 * Math.sin(-theta - 2.5)];
    ctx.moveTo(tip[0], tip[1]);
    ctx.lineTo(l[0], l[1]);
    ctx.lineTo(r[0], r[1]);
    ctx.closePath();
    ctx.fill();
    ctx.stroke();
  }
}

function segmentDistance(
  px: number,
  py: number,
  x1: number,
  y1: number,
  x2: number,
  y2: number,
): number {
  const dx = x2 - x1;
  const dy = y2 - y1;
  const lenSq = dx * dx + dy * dy;
  const t = lenSq === 0 ? 0 : Math.max(0, Math.min(1, ((px - x1) * dx + (py - y1) * dy) / lenSq));
  const cx = x1 + t * dx;
  const cy = y1 + t * dy;
  return Math.hypot(px - cx, py - cy);
}

// nodes win over edges; both use a small pixel tolerance
export function hitTest(
  scene: Scene,
  view: Viewport,
  px: number,
  py: number,
): Selection | null {
  let best: Selection | null = null;
  let bestDist = 9;
  for (const node of scene.nodes) {
    const [x, y] = project(view, node.x, node.y);
    const d = Math.hypot(px - x, py - y);
    if (d < bestDist) {
      bestDist = d;
      best = { kind: "node", id: node.id };
    }
  }
  if (best) return best;
  bestDist = 7;
  for (const edge of scene.edges) {
    const [x1, y1] = project(view, edge.x1, edge.y1);
    const [x2, y2] = project(view, edge.x2, edge.y2);
    const d = edge.selfLoop
      ? Math.abs(Math.hypot(px - (x1 + 10), py - (y1 - 10)) - 8)
      : segmentDistance(px, py, x1, y1, x2, y2);
    if (d < bestDist) {
      bestDist = d;
      best = { kind: "edge", id: edge.id };
    }
  }
  return best;
}
