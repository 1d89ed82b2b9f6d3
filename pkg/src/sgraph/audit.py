"""Log auditors and replay reconstruction.

Everything here works from a recorded event log alone: folding graph
deltas back into a graph image, checking the waypoint spacing rule,
and checking the autonomy gating invariants. The mission server's
replay mode and the acceptance checks share these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .events import LogHeader, MissionEvent, read_log

__all__ = [
    "ReplayGraph",
    "ReplayState",
    "fold_deltas",
    "replay_state",
    "waypoint_spacing_violations",
    "gating_violations",
    "l4_motion_violations",
]


class AuditError(ValueError):
    """A log cannot be folded back into a consistent graph."""


@dataclass
class ReplayGraph:
    """Graph image rebuilt from graph_delta payloads (wire-level dicts)."""

    nodes: dict[int, dict] = field(default_factory=dict)
    edges: dict[int, dict] = field(default_factory=dict)
    revision: int = 0

    def kind_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for node in self.nodes.values():
            counts[node["kind"]] = counts.get(node["kind"], 0) + 1
        return counts

    def apply(self, delta: dict) -> None:
        kind = delta.get("type")
        payload = delta.get("payload", {})
        revision = delta.get("revision")
        if not isinstance(revision, int) or revision <= self.revision:
            raise AuditError(f"revision did not advance: {revision!r}")
        self.revision = revision
        if kind == "node_added":
            self.nodes[payload["id"]] = dict(payload)
        elif kind == "node_removed":
            if payload["id"] not in self.nodes:
                raise AuditError(f"removed unknown node {payload['id']}")
            del self.nodes[payload["id"]]
            for eid in payload["edge_ids"]:
                self.edges.pop(eid, None)
        elif kind == "edge_added":
            for edge in payload["edges"]:
                self.edges[edge["id"]] = dict(edge)
        elif kind == "edge_removed":
            for eid in payload["ids"]:
                if eid not in self.edges:
                    raise AuditError(f"removed unknown edge {eid}")
                del self.edges[eid]
        elif kind == "situation_updated":
            node = self.nodes.get(payload["id"])
            if node is None:
                raise AuditError(f"situation for unknown node {payload['id']}")
            node.update(payload)
        else:
            raise AuditError(f"unknown delta type {kind!r}")


@dataclass
class ReplayState:
    """Everything a log yields when replayed to the end."""

    header: LogHeader
    events: list[MissionEvent]
    graph: ReplayGraph
    level: int
    final_step: int
    outcome: str | None


def fold_deltas(deltas) -> ReplayGraph:
    graph = ReplayGraph()
    for delta in deltas:
        graph.apply(delta)
    return graph


def replay_state(path: str | Path, initial_level: int = 1) -> ReplayState:
    header, events = read_log(path)
    graph = ReplayGraph()
    level = initial_level
    outcome = None
    final_step = 0
    for event in events:
        final_step = max(final_step, event.step)
        if event.kind == "graph_delta":
            graph.apply(event.payload)
        elif event.kind == "autonomy_changed":
            level = event.payload["level"]
        elif event.kind == "mission_complete":
            outcome = event.payload.get("outcome", "MissionComplete")
    return ReplayState(header, events, graph, level, final_step, outcome)


# -- spacing ------------------------------------------------------------------

def waypoint_spacing_violations(events, min_spacing: float = 2.0) -> list[dict]:
    """Consecutive observer-created WAYPOINT nodes closer than min_spacing.

    Observer-created means origin "initial" or "spacing". Affordance
    nodes (door approach and postcondition) and frontier nodes are
    placed by other rules and are exempt.
    """
    previous = None
    violations = []
    for event in events:
        if event.kind != "graph_delta":
            continue
        delta = event.payload
        if delta.get("type") != "node_added":
            continue
        payload = delta["payload"]
        if payload.get("origin") not in ("initial", "spacing"):
            continue
        pose = payload["pose"]
        if previous is not None:
            dist = math.hypot(pose["x"] - previous[1]["x"], pose["y"] - previous[1]["y"])
            if dist < min_spacing:
                violations.append({
                    "nodes": (previous[0], payload["id"]),
                    "distance": dist,
                })
        previous = (payload["id"], pose)
    return violations


# -- autonomy gating ----------------------------------------------------------

def gating_violations(events, initial_level: int = 1) -> list[str]:
    """Violations of the level gates, judged in stream order.

    A plan event must never appear at L3/L4, an autonomously selected
    job (plan payload "job" set) must only appear at L1, and an
    accepted teleop command must only appear at L4.
    """
    level = initial_level
    violations = []
    for event in events:
        if event.kind == "autonomy_changed":
            level = event.payload["level"]
        elif event.kind == "plan":
            if level >= 3:
                violations.append(f"seq {event.seq}: plan event at L{level}")
            if event.payload.get("job") is not None and level != 1:
                violations.append(f"seq {event.seq}: job selection at L{level}")
        elif event.kind == "command":
            payload = event.payload
            if (payload.get("command", {}).get("type") == "teleop"
                    and payload.get("accepted") and level != 4):
                violations.append(f"seq {event.seq}: teleop accepted at L{level}")
    return violations


def l4_motion_violations(events, initial_level: int = 1,
                         tolerance: float = 1e-9) -> list[str]:
    """Steps where the robot moved under L4 without an accepted teleop.

    Pose updates are sensed at the start of a cycle, so motion during
    cycle k shows up in the pose at step k+1; it is judged against the
    level in force at cycle k and the teleop commands accepted there.
    """
    level = initial_level
    level_at: dict[int, int] = {}
    teleop_at: set[int] = set()
    poses: dict[int, tuple[float, float]] = {}
    for event in events:
        if event.kind == "autonomy_changed":
            level = event.payload["level"]
        elif event.kind == "command":
            payload = event.payload
            if payload.get("command", {}).get("type") == "teleop" and payload.get("accepted"):
                teleop_at.add(event.step)
        elif event.kind == "perception" and event.payload.get("event") == "pose_update":
            pose = event.payload["pose"]
            poses[event.step] = (pose["x"], pose["y"])
        level_at[event.step] = level

    violations = []
    for step in sorted(poses):
        if step + 1 not in poses:
            continue
        x0, y0 = poses[step]
        x1, y1 = poses[step + 1]
        if math.hypot(x1 - x0, y1 - y0) <= tolerance:
            continue
        if level_at.get(step, initial_level) == 4 and step not in teleop_at:
            violations.append(f"step {step}: motion at L4 without teleop")
    return violations
