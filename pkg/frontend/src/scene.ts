// Pure scene construction: graph state in, drawable primitives out.
// The color contract: waypoint nodes red, frontier nodes green, detected
// objects blue; goTo edges red lines, other behavior edges blue arrows.

import type { MissionState } from "./state";

export const COLORS = {
  waypoint: "#d9534f",
  frontier: "#3fa34d",
  object: "#2a6fdb",
  gotoEdge: "#d9534f",
  behaviorEdge: "#2a6fdb",
  plan: "#f0a202",
  robot: "#1b1b1b",
} as const;

export interface Layers {
  waypoints: boolean;
  frontiers: boolean;
  objects: boolean;
  edges: boolean;
  grid: boolean;
  plan: boolean;
}

export function defaultLayers(): Layers {
  return { waypoints: true, frontiers: true, objects: true, edges: true,
           grid: true, plan: true };
}

export interface SceneNode {
  id: number;
  x: number;
  y: number;
  kind: string;
  color: string;
}

export interface SceneEdge {
  id: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  behavior: string;
  color: string;
  arrow: boolean;
  planned: boolean;
  selfLoop: boolean;
}

export interface SceneObject {
  id: string;
  label: string;
  x: number;
  y: number;
  color: string;
  state?: string;
  seenFrom: { x: number; y: number }[];
}

export interface Scene {
  nodes: SceneNode[];
  edges: SceneEdge[];
  objects: SceneObject[];
  counts: { red: number; green: number; blue: number };
}

export function nodeColor(kind: string): string {
  return kind === "frontier" ? COLORS.frontier : COLORS.waypoint;
}

export function edgeColor(behavior: string): string {
  return behavior === "goTo" ? COLORS.gotoEdge : COLORS.behaviorEdge;
}

export function buildScene(
  state: MissionState,
  layers: Layers = defaultLayers(),
): Scene {
  // sorted by id so the scene is identical whether the state was folded
  // from deltas or rebuilt from a snapshot
  const nodeList = [...state.nodes.values()].sort((a, b) => a.id - b.id);
  const edgeList = [...state.edges.values()].sort((a, b) => a.id - b.id);

  const counts = { red: 0, green: 0, blue: 0 };
  const nodes: SceneNode[] = [];
  for (const node of nodeList) {
    if (node.kind === "frontier") counts.green += 1;
    else counts.red += 1;
    const wanted = node.kind === "frontier" ? layers.frontiers : layers.waypoints;
    if (wanted) {
      nodes.push({ id: node.id, x: node.pose.x, y: node.pose.y,
                   kind: node.kind, color: nodeColor(node.kind) });
    }
  }

  const planSet = new Set(layers.plan ? state.planEdges : []);
  const edges: SceneEdge[] = [];
  if (layers.edges) {
    for (const edge of edgeList) {
      const source = state.nodes.get(edge.source);
      const target = state.nodes.get(edge.target);
      if (!source || !target) continue;
      edges.push({
        id: edge.id,
        x1: source.pose.x, y1: source.pose.y,
        x2: target.pose.x, y2: target.pose.y,
        behavior: edge.behavior,
        color: edgeColor(edge.behavior),
        arrow: edge.behavior !== "goTo",
        planned: planSet.has(edge.id),
        selfLoop: edge.source === edge.target,
      });
    }
  }

  // one marker per detected object, with a thin ray from every node
  // whose situation recorded it
  const objects = new Map<string, SceneObject>();
  for (const node of nodeList) {
    for (const obj of node.objects) {
      let marker = objects.get(obj.id);
      if (!marker) {
        marker = { id: obj.id, label: obj.label, x: obj.pose.x, y: obj.pose.y,
                   color: COLORS.object, state: obj.state, seenFrom: [] };
        objects.set(obj.id, marker);
      }
      marker.seenFrom.push({ x: node.pose.x, y: node.pose.y });
      if (obj.state !== undefined) marker.state = obj.state;
    }
  }
  counts.blue = objects.size;

  return {
    nodes,
    edges,
    objects: layers.objects ? [...objects.values()] : [],
    counts,
  };
}
