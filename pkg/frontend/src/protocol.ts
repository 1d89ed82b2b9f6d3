// Frame and command shapes of the mission server wire protocol.
// One JSON text frame per message; every server frame carries seq and step.

export interface PoseJson {
  x: number;
  y: number;
  theta: number;
}

export interface Pose3Json {
  x: number;
  y: number;
  z: number;
  roll: number;
  pitch: number;
  yaw: number;
}

export interface ObjectJson {
  id: string;
  label: string;
  pose: Pose3Json;
  state?: string;
}

export interface GridmapJson {
  width: number;
  height: number;
  resolution: number;
  origin: PoseJson;
  cells: string; // run-length encoded, e.g. "12U3F1O"
}

export interface NodeJson {
  id: number;
  kind: string;
  pose: PoseJson;
  objects: ObjectJson[];
  gridmap?: GridmapJson;
  origin?: string;
}

export interface EdgeJson {
  id: number;
  source: number;
  target: number;
  behavior: string;
  object_params: string[];
  cost: number;
}

export interface GraphJson {
  revision: number;
  nodes: NodeJson[];
  edges: EdgeJson[];
}

export interface DeltaJson {
  type: string;
  payload: Record<string, unknown>;
  revision: number;
}

export interface PlanJson {
  start: number;
  goal: number;
  edges: number[];
  total_cost: number;
}

export interface JobJson {
  target: number;
  reward: number;
  cost: number;
  net: number;
}

interface FrameBase {
  seq: number;
  step: number;
}

export interface SnapshotFrame extends FrameBase {
  type: "snapshot";
  graph: GraphJson;
  robot: { pose: PoseJson | null };
  level: number;
  paused: boolean;
  complete: boolean;
}

export interface GraphDeltaFrame extends FrameBase {
  type: "graph_delta";
  delta: DeltaJson;
}

export interface RobotStateFrame extends FrameBase {
  type: "robot_state";
  pose: PoseJson;
  level: number;
  paused: boolean;
}

export interface EventFrame extends FrameBase {
  type: "event";
  kind: string;
  payload: Record<string, any>;
  event_seq: number;
}

export interface PlanFrame extends FrameBase {
  type: "plan";
  plan: PlanJson | null;
  job: JobJson | null;
}

export interface ErrorFrame extends FrameBase {
  type: "error";
  reason: string;
}

export type ServerFrame =
  | SnapshotFrame
  | GraphDeltaFrame
  | RobotStateFrame
  | EventFrame
  | PlanFrame
  | ErrorFrame;

export type ClientCommand =
  | { type: "set_autonomy"; level: number }
  | { type: "allocate_job"; node: number }
  | { type: "execute_behavior"; edge: number }
  | { type: "teleop"; vx: number; vy: number; wz: number }
  | { type: "release_teleop" }
  | { type: "pause" }
  | { type: "resume" };
