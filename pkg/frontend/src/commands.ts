// Client-side command gating, mirroring the server's autonomy rules.
// The UI must never emit a message the server would gate-reject.

import type { ClientCommand } from "./protocol";
import type { MissionState } from "./state";

export const GATES: Record<string, readonly number[]> = {
  set_autonomy: [1, 2, 3, 4],
  allocate_job: [2],
  execute_behavior: [3],
  teleop: [4],
  release_teleop: [4],
  pause: [1, 2, 3, 4],
  resume: [1, 2, 3, 4],
};

export function allows(level: number, type: string): boolean {
  return (GATES[type] ?? []).includes(level);
}

// Node click: at L2 it allocates the job; at any other level it only selects.
export function nodeClickCommand(
  state: MissionState,
  nodeId: number,
): ClientCommand | null {
  if (!allows(state.level, "allocate_job")) return null;
  if (!state.nodes.has(nodeId)) return null;
  return { type: "allocate_job", node: nodeId };
}

// Edge click: at L3 it triggers the behavior; otherwise select-only.
export function edgeClickCommand(
  state: MissionState,
  edgeId: number,
): ClientCommand | null {
  if (!allows(state.level, "execute_behavior")) return null;
  if (!state.edges.has(edgeId)) return null;
  return { type: "execute_behavior", edge: edgeId };
}

export function setAutonomyCommand(level: number): ClientCommand {
  return { type: "set_autonomy", level };
}

export function takeControlCommand(): ClientCommand {
  return setAutonomyCommand(4);
}
