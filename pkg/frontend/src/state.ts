// The client-side mission mirror: a pure fold over server frames.
// The UI keeps no authoritative state; everything here is reconstructible
// from a snapshot plus the delta stream, and a fresh snapshot resyncs it.

import type {
  DeltaJson,
  EdgeJson,
  GraphJson,
  GridmapJson,
  NodeJson,
  ObjectJson,
  PoseJson,
  ServerFrame,
  SnapshotFrame,
} from "./protocol";

export interface NodeView {
  id: number;
  kind: string;
  pose: PoseJson;
  objects: ObjectJson[];
  gridmap?: GridmapJson;
  origin?: string;
}

export interface MissionState {
  connected: boolean;
  desynced: boolean;
  lastSeq: number;
  step: number;
  level: number;
  paused: boolean;
  complete: boolean;
  robot: PoseJson | null;
  revision: number;
  nodes: Map<number, NodeView>;
  edges: Map<number, EdgeJson>;
  planEdges: number[];
  planGoal: number | null;
  job: number | null;
  lastError: string | null;
}

export function initialState(): MissionState {
  return {
    connected: false,
    desynced: false,
    lastSeq: 0,
    step: 0,
    level: 1,
    paused: false,
    complete: false,
    robot: null,
    revision: 0,
    nodes: new Map(),
    edges: new Map(),
    planEdges: [],
    planGoal: null,
    job: null,
    lastError: null,
  };
}

function loadGraph(state: MissionState, graph: GraphJson): void {
  state.nodes = new Map(graph.nodes.map((n) => [n.id, { ...n }]));
  state.edges = new Map(graph.edges.map((e) => [e.id, e]));
  state.revision = graph.revision;
}

function applySnapshot(state: MissionState, frame: SnapshotFrame): void {
  loadGraph(state, frame.graph);
  state.robot = frame.robot.pose;
  state.level = frame.level;
  state.paused = frame.paused;
  state.complete = frame.complete;
  state.planEdges = [];
  state.planGoal = null;
  state.job = null;
  state.desynced = false;
}

function applyDelta(state: MissionState, delta: DeltaJson): void {
  const p = delta.payload as any;
  switch (delta.type) {
    case "node_added":
      state.nodes.set(p.id, { ...p });
      break;
    case "node_removed":
      state.nodes.delete(p.id);
      for (const edgeId of p.edge_ids as number[]) state.edges.delete(edgeId);
      break;
    case "edge_added":
      for (const edge of p.edges as EdgeJson[]) state.edges.set(edge.id, edge);
      break;
    case "edge_removed":
      for (const edgeId of p.ids as number[]) state.edges.delete(edgeId);
      break;
    case "situation_updated": {
      const node = state.nodes.get(p.id);
      if (node) {
        node.objects = p.objects;
        if (p.gridmap) node.gridmap = p.gridmap;
        if (p.kind) node.kind = p.kind;
      }
      break;
    }
    default:
      console.warn(`ignoring unknown graph delta kind ${delta.type}`);
      return;
  }
  state.revision = delta.revision;
}

export function applyFrame(state: MissionState, frame: ServerFrame): void {
  // a snapshot starts a fresh sequence (new connection or resync)
  if (frame.type === "snapshot") {
    state.lastSeq = frame.seq;
  } else {
    if (state.lastSeq !== 0 && frame.seq !== state.lastSeq + 1) {
      state.desynced = true;
    }
    state.lastSeq = frame.seq;
  }
  state.step = frame.step;

  switch (frame.type) {
    case "snapshot":
      applySnapshot(state, frame);
      break;
    case "graph_delta":
      applyDelta(state, frame.delta);
      break;
    case "robot_state":
      state.robot = frame.pose;
      state.level = frame.level;
      state.paused = frame.paused;
      break;
    case "event":
      if (frame.kind === "autonomy_changed") {
        state.level = frame.payload.level;
      } else if (frame.kind === "mission_complete") {
        state.complete = true;
      }
      break;
    case "plan":
      state.planEdges = frame.plan ? [...frame.plan.edges] : [];
      state.planGoal = frame.plan ? frame.plan.goal : null;
      state.job = frame.job ? frame.job.target : null;
      break;
    case "error":
      state.lastError = frame.reason;
      break;
  }
}

// Rebuild a snapshot frame from the folded state. Applying it to a fresh
// state must reproduce the same scene (the resync idempotence property).
export function toSnapshotFrame(state: MissionState): SnapshotFrame {
  const nodes: NodeJson[] = [...state.nodes.values()]
    .sort((a, b) => a.id - b.id)
    .map((n) => ({ ...n }));
  const edges: EdgeJson[] = [...state.edges.values()].sort((a, b) => a.id - b.id);
  return {
    type: "snapshot",
    seq: state.lastSeq,
    step: state.step,
    graph: { revision: state.revision, nodes, edges },
    robot: { pose: state.robot },
    level: state.level,
    paused: state.paused,
    complete: state.complete,
  };
}
