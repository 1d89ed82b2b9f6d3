import { describe, expect, it } from "vitest";

import type { SnapshotFrame } from "../src/protocol";
import { buildScene, COLORS, defaultLayers, edgeColor, nodeColor } from "../src/scene";
import { applyFrame, initialState, MissionState } from "../src/state";

const DOOR = {
  id: "o1",
  label: "door",
  pose: { x: 1, y: 0.5, z: 0, roll: 0, pitch: 0, yaw: 0 },
  state: "CLOSED",
};

function demoState(): MissionState {
  const frame: SnapshotFrame = {
    type: "snapshot",
    seq: 1,
    step: 0,
    graph: {
      revision: 9,
      nodes: [
        {
          id: 1,
          kind: "waypoint",
          pose: { x: 0, y: 0, theta: 0 },
          objects: [DOOR],
        },
        {
          id: 2,
          kind: "waypoint",
          pose: { x: 3, y: 0, theta: 0 },
          objects: [DOOR],
        },
        {
          id: 3,
          kind: "frontier",
          pose: { x: 3, y: 3, theta: 0 },
          objects: [],
        },
      ],
      edges: [
        {
          id: 10,
          source: 1,
          target: 2,
          behavior: "goTo",
          object_params: [],
          cost: 3,
        },
        {
          id: 11,
          source: 2,
          target: 1,
          behavior: "goTo",
          object_params: [],
          cost: 3,
        },
        {
          id: 12,
          source: 2,
          target: 3,
          behavior: "goTo",
          object_params: [],
          cost: 3,
        },
        {
          id: 13,
          source: 1,
          target: 1,
          behavior: "openDoor",
          object_params: ["o1"],
          cost: 5,
        },
      ],
    },
    robot: { pose: { x: 0.5, y: 0, theta: 0 } },
    level: 2,
    paused: false,
    complete: false,
  };
  const state = initialState();
  applyFrame(state, frame);
  return state;
}

describe("color contract", () => {
  it("paints waypoints red, frontiers green, objects blue", () => {
    expect(nodeColor("waypoint")).toBe(COLORS.waypoint);
    expect(nodeColor("frontier")).toBe(COLORS.frontier);
    expect(COLORS.waypoint).toBe("#d9534f");
    expect(COLORS.frontier).toBe("#3fa34d");
    expect(COLORS.object).toBe("#2a6fdb");
  });

  it("paints travel edges red and behavior edges blue", () => {
    expect(edgeColor("goTo")).toBe(COLORS.gotoEdge);
    expect(edgeColor("openDoor")).toBe(COLORS.behaviorEdge);
    expect(edgeColor("requestTeleop")).toBe(COLORS.behaviorEdge);
  });
});

describe("buildScene", () => {
  it("counts color classes over the whole graph", () => {
    const scene = buildScene(demoState());
    expect(scene.counts).toEqual({ red: 2, green: 1, blue: 1 });
  });

  it("marks only non-travel edges with arrows", () => {
    const scene = buildScene(demoState());
    const arrows = new Map(scene.edges.map((e) => [e.id, e.arrow]));
    expect(arrows.get(10)).toBe(false);
    expect(arrows.get(13)).toBe(true);
  });

  it("flags the self loop for offset rendering", () => {
    const scene = buildScene(demoState());
    const loop = scene.edges.find((e) => e.id === 13);
    expect(loop?.selfLoop).toBe(true);
  });

  it("merges duplicate object sightings into one marker with rays", () => {
    const scene = buildScene(demoState());
    expect(scene.objects).toHaveLength(1);
    expect(scene.objects[0].id).toBe("o1");
    expect(scene.objects[0].state).toBe("CLOSED");
    expect(scene.objects[0].seenFrom).toHaveLength(2);
  });

  it("highlights the planned path", () => {
    const state = demoState();
    state.planEdges = [12];
    state.planGoal = 3;
    const scene = buildScene(state);
    const planned = scene.edges.filter((e) => e.planned).map((e) => e.id);
    expect(planned).toEqual([12]);
  });

  it("drops the highlight when the plan layer is off", () => {
    const state = demoState();
    state.planEdges = [12];
    const layers = defaultLayers();
    layers.plan = false;
    const scene = buildScene(state, layers);
    expect(scene.edges.some((e) => e.planned)).toBe(false);
  });

  it("hides layers without changing the counts", () => {
    const layers = defaultLayers();
    layers.frontiers = false;
    layers.objects = false;
    layers.edges = false;
    const scene = buildScene(demoState(), layers);
    expect(scene.nodes.every((n) => n.kind !== "frontier")).toBe(true);
    expect(scene.objects).toHaveLength(0);
    expect(scene.edges).toHaveLength(0);
    expect(scene.counts).toEqual({ red: 2, green: 1, blue: 1 });
  });

  it("skips edges whose endpoints are gone", () => {
    const state = demoState();
    state.nodes.delete(3);
    const scene = buildScene(state);
    expect(scene.edges.find((e) => e.id === 12)).toBeUndefined();
  });

  it("lists nodes and edges in id order regardless of arrival order", () => {
    const state = demoState();
    const node = state.nodes.get(1)!;
    state.nodes.delete(1);
    state.nodes.set(1, node); // now last in insertion order
    const scene = buildScene(state);
    expect(scene.nodes.map((n) => n.id)).toEqual([1, 2, 3]);
    expect(scene.edges.map((e) => e.id)).toEqual([10, 11, 12, 13]);
  });

  it("builds a 500 node scene fast enough for live redraws", () => {
    const state = initialState();
    for (let i = 0; i < 500; i++) {
      state.nodes.set(i, {
        id: i,
        kind: i % 5 === 0 ? "frontier" : "waypoint",
        pose: { x: i % 25, y: Math.floor(i / 25), theta: 0 },
        objects: [],
      });
    }
    for (let i = 1; i < 500; i++) {
      state.edges.set(i, {
        id: i,
        source: i - 1,
        target: i,
        behavior: "goTo",
        object_params: [],
        cost: 1,
      });
    }
    buildScene(state);
    const t0 = performance.now();
    for (let k = 0; k < 10; k++) buildScene(state);
    const perBuild = (performance.now() - t0) / 10;
    expect(perBuild).toBeLessThan(33);
  });
});
