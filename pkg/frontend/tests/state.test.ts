import { describe, expect, it, vi } from "vitest";

import type {
  GraphDeltaFrame,
  ServerFrame,
  SnapshotFrame,
} from "../src/protocol";
import { applyFrame, initialState } from "../src/state";

function snapshot(seq = 1): SnapshotFrame {
  return {
    type: "snapshot",
    seq,
    step: 0,
    graph: {
      revision: 2,
      nodes: [
        {
          id: 1,
          kind: "waypoint",
          pose: { x: 0, y: 0, theta: 0 },
          objects: [],
        },
      ],
      edges: [],
    },
    robot: { pose: { x: 0, y: 0, theta: 0 } },
    level: 1,
    paused: false,
    complete: false,
  };
}

function delta(
  seq: number,
  step: number,
  kind: string,
  payload: Record<string, unknown>,
  revision: number,
): GraphDeltaFrame {
  return {
    type: "graph_delta",
    seq,
    step,
    delta: { type: kind, payload, revision },
  };
}

const nodePayload = (id: number, kind: "waypoint" | "frontier") => ({
  id,
  kind,
  pose: { x: id, y: 0, theta: 0 },
  objects: [],
});

describe("applyFrame", () => {
  it("loads a snapshot", () => {
    const state = initialState();
    applyFrame(state, snapshot());
    expect(state.revision).toBe(2);
    expect(state.nodes.get(1)?.kind).toBe("waypoint");
    expect(state.level).toBe(1);
  });

  it("folds node and edge deltas", () => {
    const state = initialState();
    applyFrame(state, snapshot());
    applyFrame(state, delta(2, 1, "node_added", nodePayload(2, "frontier"), 3));
    applyFrame(
      state,
      delta(3, 1, "edge_added", {
        edges: [
          {
            id: 10,
            source: 1,
            target: 2,
            behavior: "goTo",
            object_params: [],
            cost: 1.5,
          },
        ],
      }, 4),
    );
    expect(state.nodes.size).toBe(2);
    expect(state.edges.get(10)?.behavior).toBe("goTo");
    expect(state.revision).toBe(4);
  });

  it("drops incident edges with a removed node", () => {
    const state = initialState();
    applyFrame(state, snapshot());
    applyFrame(state, delta(2, 1, "node_added", nodePayload(2, "frontier"), 3));
    applyFrame(
      state,
      delta(3, 1, "edge_added", {
        edges: [
          {
            id: 10,
            source: 1,
            target: 2,
            behavior: "goTo",
            object_params: [],
            cost: 1.5,
          },
        ],
      }, 4),
    );
    applyFrame(state, delta(4, 2, "node_removed", { id: 2, edge_ids: [10] }, 5));
    expect(state.nodes.has(2)).toBe(false);
    expect(state.edges.has(10)).toBe(false);
    expect(state.revision).toBe(5);
  });

  it("updates a situation in place without moving the node", () => {
    const state = initialState();
    applyFrame(state, snapshot());
    applyFrame(
      state,
      delta(2, 1, "situation_updated", {
        id: 1,
        kind: "waypoint",
        objects: [
          {
            id: "o1",
            label: "door",
            pose: { x: 1, y: 1, z: 0, roll: 0, pitch: 0, yaw: 0 },
            state: "CLOSED",
          },
        ],
      }, 3),
    );
    const node = state.nodes.get(1);
    expect(node?.objects).toHaveLength(1);
    expect(node?.pose).toEqual({ x: 0, y: 0, theta: 0 });
    expect(state.revision).toBe(3);
  });

  it("flags a desync on a sequence gap and clears it on snapshot", () => {
    const state = initialState();
    applyFrame(state, snapshot());
    applyFrame(state, delta(2, 1, "node_added", nodePayload(2, "frontier"), 3));
    applyFrame(state, delta(5, 2, "node_added", nodePayload(3, "frontier"), 4));
    expect(state.desynced).toBe(true);
    applyFrame(state, snapshot(6));
    expect(state.desynced).toBe(false);
    expect(state.lastSeq).toBe(6);
  });

  it("ignores an unknown delta kind with a warning", () => {
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const state = initialState();
    applyFrame(state, snapshot());
    applyFrame(state, delta(2, 1, "node_painted", { id: 1 }, 3));
    // the revision must not claim a change the client could not apply
    expect(state.revision).toBe(2);
    expect(state.nodes.size).toBe(1);
    expect(warn).toHaveBeenCalled();
    warn.mockRestore();
  });

  it("tracks robot state frames", () => {
    const state = initialState();
    applyFrame(state, snapshot());
    const frame: ServerFrame = {
      type: "robot_state",
      seq: 2,
      step: 7,
      pose: { x: 3, y: 4, theta: 1 },
      level: 4,
      paused: true,
    };
    applyFrame(state, frame);
    expect(state.robot).toEqual({ x: 3, y: 4, theta: 1 });
    expect(state.level).toBe(4);
    expect(state.paused).toBe(true);
    expect(state.step).toBe(7);
  });

  it("mirrors autonomy changes and completion from events", () => {
    const state = initialState();
    applyFrame(state, snapshot());
    applyFrame(state, {
      type: "event",
      seq: 2,
      step: 3,
      kind: "autonomy_changed",
      payload: { level: 3, previous: 1 },
      event_seq: 40,
    });
    expect(state.level).toBe(3);
    applyFrame(state, {
      type: "event",
      seq: 3,
      step: 9,
      kind: "mission_complete",
      payload: { steps: 9, coverage_fraction: 1.0 },
      event_seq: 41,
    });
    expect(state.complete).toBe(true);
  });

  it("keeps the latest plan and error", () => {
    const state = initialState();
    applyFrame(state, snapshot());
    applyFrame(state, {
      type: "plan",
      seq: 2,
      step: 4,
      plan: { start: 1, goal: 2, edges: [10, 11], total_cost: 3.25 },
      job: { target: 2, reward: 10, cost: 3.25, net: 6.75 },
    });
    expect(state.planEdges).toEqual([10, 11]);
    expect(state.planGoal).toBe(2);
    expect(state.job).toBe(2);
    applyFrame(state, {
      type: "error",
      seq: 3,
      step: 4,
      reason: "requires level 2",
    });
    expect(state.lastError).toBe("requires level 2");
  });

  it("clears the plan when the server sends a null plan", () => {
    const state = initialState();
    applyFrame(state, snapshot());
    applyFrame(state, {
      type: "plan",
      seq: 2,
      step: 4,
      plan: { start: 1, goal: 2, edges: [10], total_cost: 1 },
      job: { target: 2, reward: 10, cost: 1, net: 9 },
    });
    applyFrame(state, { type: "plan", seq: 3, step: 6, plan: null, job: null });
    expect(state.planEdges).toEqual([]);
    expect(state.planGoal).toBeNull();
    expect(state.job).toBeNull();
  });
});
