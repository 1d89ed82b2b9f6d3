"""Graph recording: fold perception events into the situational graph.

The recorder is the sole graph writer. Each mission cycle it fuses the
latest lidar grid into a global view, spawns waypoint nodes as the robot
moves, writes situations, applies the four affordance rules (frontier,
closed door, person, container), revalidates goTo corridors, and prunes
stale frontier nodes. Every mutation is reported as a GraphDelta suitable
for the event log and the wire protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import Pose2
from .gridmap import CellState, GridMap
from .graph import (
    BehaviorKind,
    DoorState,
    EdgeId,
    NodeId,
    NodeKind,
    ObjectId,
    ObjectLabel,
    SituationalGraph,
    UnknownNode,
    WorldObject,
)
from .world import DoorStateChanged, LocalGrid, ObjectDetected, PerceptionEvent, PoseUpdate

_GROW = 16  # global view expands in blocks of this many cells


@dataclass
class RecorderConfig:
    node_spacing: float = 2.0
    frontier_min_cluster: int = 3
    frontier_separation: float = 1.0
    prune_radius: float = 0.5
    doorway_offset: float = 1.0
    visit_radius: float = 0.3     # arrival distance that marks a node visited
    corridor_radius: float = 0.3  # robot radius used to validate goTo edges
    door_reach: float = 1.5      # max node-to-door distance for an openDoor edge
    open_door_cost: float = 5.0
    teleop_cost: float = 100.0

    def __post_init__(self) -> None:
        for name in ("node_spacing", "frontier_min_cluster", "frontier_separation",
                     "prune_radius", "doorway_offset", "visit_radius", "corridor_radius",
                     "door_reach", "open_door_cost", "teleop_cost"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class GraphDelta:
    """One primitive graph change, tagged with the revision it produced."""

    kind: str  # node_added | node_removed | edge_added | edge_removed | situation_updated
    payload: dict
    revision: int

    def to_json(self) -> dict:
        return {"type": self.kind, "payload": self.payload, "revision": self.revision}

    @classmethod
    def from_json(cls, data: dict) -> GraphDelta:
        return cls(data["type"], data["payload"], data["revision"])


class GlobalView:
    """Fused occupancy grid on the world lattice, grown on demand.

    Cells outside the stored array are UNKNOWN. Known cells never become
    unknown again (latest observation wins between FREE and OCCUPIED).
    """

    def __init__(self, resolution: float):
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        self.resolution = resolution
        self.ox = 0  # world cell index of cells[0, 0]
        self.oy = 0
        self.cells = np.zeros((0, 0), dtype=np.uint8)

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def _ensure(self, ix0: int, iy0: int, ix1: int, iy1: int) -> None:
        """Grow the array (in _GROW blocks) to cover the inclusive cell range."""
        gx0 = (ix0 // _GROW) * _GROW
        gy0 = (iy0 // _GROW) * _GROW
        gx1 = ((ix1 // _GROW) + 1) * _GROW
        gy1 = ((iy1 // _GROW) + 1) * _GROW
        if self.cells.size == 0:
            self.ox, self.oy = gx0, gy0
            self.cells = np.zeros((gy1 - gy0, gx1 - gx0), dtype=np.uint8)
            return
        pad_left = max(0, self.ox - gx0)
        pad_down = max(0, self.oy - gy0)
        pad_right = max(0, gx1 - (self.ox + self.width))
        pad_up = max(0, gy1 - (self.oy + self.height))
        if pad_left or pad_down or pad_right or pad_up:
            self.cells = np.pad(self.cells, ((pad_down, pad_up), (pad_left, pad_right)))
            self.ox -= pad_left
            self.oy -= pad_down

    def update(self, local: GridMap) -> list[tuple[int, int]]:
        """Fuse one lattice-aligned local grid; returns newly OCCUPIED cells."""
        if abs(local.resolution - self.resolution) > 1e-12:
            raise ValueError("local grid resolution does not match the view")
        if local.width == 0 or local.height == 0:
            return []
        fx = local.origin.x / self.resolution
        fy = local.origin.y / self.resolution
        gx, gy = round(fx), round(fy)
        if abs(fx - gx) > 1e-6 or abs(fy - gy) > 1e-6:
            raise ValueError("local grid origin is not on the world lattice")
        self._ensure(gx, gy, gx + local.width - 1, gy + local.height - 1)
        x0 = gx - self.ox
        y0 = gy - self.oy
        region = self.cells[y0:y0 + local.height, x0:x0 + local.width]
        known = local.cells != CellState.UNKNOWN
        changed = known & (region != local.cells)
        newly_occupied = changed & (local.cells == CellState.OCCUPIED)
        ys, xs = np.nonzero(newly_occupied)
        region[known] = local.cells[known]
        return [(int(x) + gx, int(y) + gy) for x, y in zip(xs, ys)]

    def state_at(self, ix: int, iy: int) -> CellState:
        jx, jy = ix - self.ox, iy - self.oy
        if 0 <= jx < self.width and 0 <= jy < self.height:
            return CellState(self.cells[jy, jx])
        return CellState.UNKNOWN

    def known_cells(self) -> int:
        return int((self.cells != CellState.UNKNOWN).sum())

    def occupied_cells(self) -> list[tuple[int, int]]:
        ys, xs = np.nonzero(self.cells == CellState.OCCUPIED)
        return [(int(x) + self.ox, int(y) + self.oy) for x, y in zip(xs, ys)]

    def unknown_within(self, x: float, y: float, radius: float) -> bool:
        """Any UNKNOWN cell center within `radius` (inclusive) of (x, y)?
        Cells beyond the stored array count as unknown."""
        res = self.resolution
        lo_x = math.floor((x - radius) / res) - 1
        hi_x = math.floor((x + radius) / res) + 1
        lo_y = math.floor((y - radius) / res) - 1
        hi_y = math.floor((y + radius) / res) + 1
        r2 = radius * radius + 1e-9
        for iy in range(lo_y, hi_y + 1):
            cy = (iy + 0.5) * res
            for ix in range(lo_x, hi_x + 1):
                cx = (ix + 0.5) * res
                if (cx - x) ** 2 + (cy - y) ** 2 <= r2 \
                        and self.state_at(ix, iy) is CellState.UNKNOWN:
                    return True
        return False

    def to_gridmap(self) -> GridMap:
        origin = Pose2(self.ox * self.resolution, self.oy * self.resolution)
        return GridMap(self.width, self.height, self.resolution, origin, self.cells.copy())


class Recorder:
    """Recording state shared across the observe/affordance/prune calls."""

    def __init__(self, graph: SituationalGraph, config: RecorderConfig | None = None):
        self.graph = graph
        self.config = config or RecorderConfig()
        self.view: GlobalView | None = None
        self.robot_pose: Pose2 | None = None
        self.door_states: dict[ObjectId, DoorState] = {}
        self.current_node: NodeId | None = None
        self.node_origins: dict[NodeId, str] = {}
        self.notifications: list[dict] = []

    def drain_notifications(self) -> list[dict]:
        out = self.notifications
        self.notifications = []
        return out


# -- delta helpers ------------------------------------------------------------

def _node_payload(graph: SituationalGraph, node: NodeId, origin: str | None = None) -> dict:
    n = graph.nodes[node]
    payload = {
        "id": n.id,
        "kind": n.kind.value,
        "pose": n.pose.to_json(),
        "objects": [n.situation.objects[oid].to_json() for oid in sorted(n.situation.objects)],
        "gridmap": n.situation.gridmap.to_json(),
    }
    if origin is not None:
        payload["origin"] = origin
    return payload


def _add_node(graph, recorder, deltas, pose, kind, origin) -> NodeId:
    nid = graph.add_node(pose, kind)
    recorder.node_origins[nid] = origin
    deltas.append(GraphDelta("node_added", _node_payload(graph, nid, origin), graph.revision))
    return nid


def _add_edge(graph, deltas, source, target, behavior, params=(), cost=0.0) -> EdgeId:
    eid = graph.add_edge(source, target, behavior, params, cost)
    edges = [graph.edges[eid].to_json()]
    mate = graph.paired_edge(eid)
    if mate is not None:
        edges.append(graph.edges[mate].to_json())
    deltas.append(GraphDelta("edge_added", {"edges": edges}, graph.revision))
    return eid


def _remove_edge(graph, deltas, edge: EdgeId) -> None:
    removed = graph.remove_edge(edge)
    deltas.append(GraphDelta("edge_removed", {"ids": list(removed)}, graph.revision))


def _remove_node(graph, recorder, deltas, node: NodeId) -> None:
    removed = graph.remove_node(node)
    recorder.node_origins.pop(node, None)
    deltas.append(GraphDelta(
        "node_removed", {"id": node, "edge_ids": list(removed)}, graph.revision))


def _situation_delta(graph, deltas, node: NodeId) -> None:
    payload = _node_payload(graph, node)
    payload.pop("pose")
    deltas.append(GraphDelta("situation_updated", payload, graph.revision))


# -- geometry helpers ---------------------------------------------------------

def _segment_clear(view: GlobalView | None, a: Pose2, b: Pose2, radius: float) -> bool:
    """No OCCUPIED view cell center strictly within `radius` of segment ab."""
    if view is None or view.cells.size == 0:
        return True
    res = view.resolution
    lo_x = math.floor((min(a.x, b.x) - radius) / res) - 1 - view.ox
    hi_x = math.floor((max(a.x, b.x) + radius) / res) + 1 - view.ox
    lo_y = math.floor((min(a.y, b.y) - radius) / res) - 1 - view.oy
    hi_y = math.floor((max(a.y, b.y) + radius) / res) + 1 - view.oy
    lo_x, hi_x = max(lo_x, 0), min(hi_x, view.width - 1)
    lo_y, hi_y = max(lo_y, 0), min(hi_y, view.height - 1)
    if lo_x > hi_x or lo_y > hi_y:
        return True
    sub = view.cells[lo_y:hi_y + 1, lo_x:hi_x + 1] == CellState.OCCUPIED
    ys, xs = np.nonzero(sub)
    if len(xs) == 0:
        return True
    cx = (xs + lo_x + view.ox + 0.5) * res
    cy = (ys + lo_y + view.oy + 0.5) * res
    return not _near_segment(cx, cy, a, b, radius).any()


def _near_segment(px: np.ndarray, py: np.ndarray, a: Pose2, b: Pose2, radius: float) -> np.ndarray:
    abx, aby = b.x - a.x, b.y - a.y
    ab2 = abx * abx + aby * aby
    if ab2 < 1e-18:
        d2 = (px - a.x) ** 2 + (py - a.y) ** 2
    else:
        u = np.clip(((px - a.x) * abx + (py - a.y) * aby) / ab2, 0.0, 1.0)
        d2 = (px - (a.x + u * abx)) ** 2 + (py - (a.y + u * aby)) ** 2
    return d2 < radius * radius


def _connect_goto(graph, recorder, deltas, node: NodeId, prefer: NodeId | None = None) -> bool:
    """Link `node` to the best other node whose straight corridor is clear.

    Tries `prefer` first, then every other node by (distance, id). Returns
    False when no collision-free connection exists; the node stays edgeless.
    """
    cfg = recorder.config
    pose = graph.nodes[node].pose
    others = [nid for nid in graph.nodes if nid != node]
    others.sort(key=lambda nid: (pose.distance_to(graph.nodes[nid].pose), nid))
    if prefer is not None and prefer in graph.nodes and prefer != node:
        others.remove(prefer)
        others.insert(0, prefer)
    linked = {e.target for e in graph.out_edges(node) if e.behavior is BehaviorKind.GOTO}
    for other in others:
        if other in linked:
            continue
        other_pose = graph.nodes[other].pose
        if _segment_clear(recorder.view, pose, other_pose, cfg.corridor_radius):
            _add_edge(graph, deltas, other, node, BehaviorKind.GOTO,
                      cost=pose.distance_to(other_pose))
            return True
    return False


def _nearest_waypoint(graph: SituationalGraph, pose: Pose2) -> tuple[NodeId | None, float]:
    best, best_d = None, math.inf
    for nid in sorted(graph.nodes):
        node = graph.nodes[nid]
        if node.kind is not NodeKind.WAYPOINT:
            continue
        d = node.pose.distance_to(pose)
        if d < best_d:
            best, best_d = nid, d
    return best, best_d


# -- observe ------------------------------------------------------------------

def observe(graph: SituationalGraph, recorder: Recorder,
            events: list[PerceptionEvent]) -> list[GraphDelta]:
    """Fold one cycle of perception events into the graph.

    Updates the global view, spawns a waypoint when the robot has moved
    more than node_spacing from every node, marks visited frontiers,
    rewrites the current node's situation, and removes goTo edges whose
    corridor now crosses an occupied cell plus openDoor edges whose door
    is now open.
    """
    cfg = recorder.config
    deltas: list[GraphDelta] = []
    new_occupied: list[tuple[int, int]] = []
    cycle_objects: dict[ObjectId, WorldObject] = {}
    local: GridMap | None = None

    for ev in events:
        if isinstance(ev, PoseUpdate):
            recorder.robot_pose = ev.pose
        elif isinstance(ev, LocalGrid):
            local = ev.gridmap
            if recorder.view is None:
                recorder.view = GlobalView(local.resolution)
            new_occupied.extend(recorder.view.update(local))
        elif isinstance(ev, ObjectDetected):
            cycle_objects[ev.object.id] = ev.object
            if ev.object.label is ObjectLabel.DOOR and ev.object.state is not None:
                recorder.door_states[ev.object.id] = ev.object.state
        elif isinstance(ev, DoorStateChanged):
            recorder.door_states[ev.object_id] = ev.state

    if recorder.robot_pose is None:
        return deltas
    pose = recorder.robot_pose

    if not graph.nodes:
        _add_node(graph, recorder, deltas, pose, NodeKind.WAYPOINT, "initial")
    else:
        nearest, dist = graph.nearest_node(pose)
        if dist > cfg.node_spacing:
            nid = _add_node(graph, recorder, deltas, pose, NodeKind.WAYPOINT, "spacing")
            _connect_goto(graph, recorder, deltas, nid, prefer=nearest)

    # first visit turns a frontier into a waypoint
    nearest, dist = graph.nearest_node(pose)
    if dist <= cfg.visit_radius and graph.nodes[nearest].kind is NodeKind.FRONTIER:
        graph.set_node_kind(nearest, NodeKind.WAYPOINT)
        _situation_delta(graph, deltas, nearest)

    current, dist = _nearest_waypoint(graph, pose)
    if current is not None and dist <= cfg.node_spacing:
        recorder.current_node = current
        if local is not None:
            node = graph.nodes[current]
            objects = {oid: cycle_objects[oid] for oid in sorted(cycle_objects)}
            if node.situation.gridmap != local or node.situation.objects != objects:
                graph.update_situation(current, local, objects)
                _situation_delta(graph, deltas, current)

    deltas.extend(_invalidate_corridors(graph, recorder, new_occupied))
    deltas.extend(_drop_opened_door_edges(graph, recorder))
    return deltas


def _invalidate_corridors(graph, recorder, new_occupied) -> list[GraphDelta]:
    if not new_occupied or recorder.view is None:
        return []
    res = recorder.view.resolution
    px = np.array([(ix + 0.5) * res for ix, _ in new_occupied])
    py = np.array([(iy + 0.5) * res for _, iy in new_occupied])
    deltas: list[GraphDelta] = []
    for eid in sorted(graph.edges):
        edge = graph.edges.get(eid)
        if edge is None or edge.behavior is not BehaviorKind.GOTO:
            continue
        a = graph.nodes[edge.source].pose
        b = graph.nodes[edge.target].pose
        if _near_segment(px, py, a, b, recorder.config.corridor_radius).any():
            _remove_edge(graph, deltas, eid)
    return deltas


def _drop_opened_door_edges(graph, recorder) -> list[GraphDelta]:
    deltas: list[GraphDelta] = []
    for eid in sorted(graph.edges):
        edge = graph.edges.get(eid)
        if edge is None or edge.behavior is not BehaviorKind.OPEN_DOOR:
            continue
        (door_id,) = edge.object_params
        if recorder.door_states.get(door_id) is not DoorState.OPEN:
            continue
        source, target = edge.source, edge.target
        _remove_edge(graph, deltas, eid)
        # the postcondition is achieved territory now: keep the node as a
        # plain waypoint and link it through the opened doorway, otherwise
        # it would be orphaned (and pruned) while the robot traverses it
        if target in graph.nodes and graph.nodes[target].kind is NodeKind.FRONTIER:
            graph.set_node_kind(target, NodeKind.WAYPOINT)
            _situation_delta(graph, deltas, target)
            has_goto = any(e.behavior is BehaviorKind.GOTO
                           for e in graph.out_edges(target) + graph.in_edges(target))
            if not has_goto:
                _connect_goto(graph, recorder, deltas, target, prefer=source)
    return deltas


# -- affordances --------------------------------------------------------------

def apply_affordances(graph: SituationalGraph, recorder: Recorder,
                      node: NodeId) -> list[GraphDelta]:
    """Refine the graph from `node`'s recorded situation.

    Closed doors gain an OPEN_DOOR edge to a fresh postcondition node
    beyond the doorway, persons and containers gain a REQUEST_TELEOP
    self-loop, and frontier clusters in the global view become FRONTIER
    nodes linked by goTo edges. Idempotent for an unchanged situation.
    """
    if node not in graph.nodes:
        raise UnknownNode(f"node {node} not in graph")
    cfg = recorder.config
    deltas: list[GraphDelta] = []
    situation = graph.nodes[node].situation

    for oid in sorted(situation.objects):
        obj = situation.objects[oid]
        if obj.label is ObjectLabel.DOOR:
            state = recorder.door_states.get(oid, obj.state)
            if state is DoorState.CLOSED and not _edge_with_param(graph, BehaviorKind.OPEN_DOOR, oid):
                deltas.extend(_door_affordance(graph, recorder, node, obj))
        elif obj.label in (ObjectLabel.PERSON, ObjectLabel.CONTAINER):
            if not _edge_with_param(graph, BehaviorKind.REQUEST_TELEOP, oid):
                eid = _add_edge(graph, deltas, node, node, BehaviorKind.REQUEST_TELEOP,
                                {oid}, cfg.teleop_cost)
                recorder.notifications.append({
                    "kind": "teleop_affordance",
                    "object": oid,
                    "label": obj.label.value,
                    "node": node,
                    "edge": eid,
                })

    if recorder.view is not None and recorder.robot_pose is not None:
        for pos in extract_frontiers(recorder.view, recorder.robot_pose, recorder):
            if _min_node_distance(graph, pos) < cfg.frontier_separation:
                continue  # a node added earlier in this loop claimed the spot
            connector = _frontier_connector(graph, recorder, node, pos)
            if connector is None:
                continue
            fid = _add_node(graph, recorder, deltas, pos, NodeKind.FRONTIER, "frontier")
            _add_edge(graph, deltas, connector, fid, BehaviorKind.GOTO,
                      cost=graph.nodes[connector].pose.distance_to(pos))
    return deltas


def _edge_with_param(graph, behavior: BehaviorKind, object_id: ObjectId) -> bool:
    return any(e.behavior is behavior and object_id in e.object_params
               for e in graph.edges.values())


def _min_node_distance(graph, pose: Pose2) -> float:
    if not graph.nodes:
        return math.inf
    return min(graph.nodes[nid].pose.distance_to(pose) for nid in graph.nodes)


def _frontier_connector(graph, recorder, detecting: NodeId, pos: Pose2) -> NodeId | None:
    """Node to link a new frontier from: the detecting node if its corridor
    is clear, else the nearest node with a clear corridor, else nothing."""
    cfg = recorder.config
    if _segment_clear(recorder.view, graph.nodes[detecting].pose, pos, cfg.corridor_radius):
        return detecting
    others = sorted((nid for nid in graph.nodes if nid != detecting),
                    key=lambda nid: (graph.nodes[nid].pose.distance_to(pos), nid))
    for nid in others:
        if _segment_clear(recorder.view, graph.nodes[nid].pose, pos, cfg.corridor_radius):
            return nid
    return None


def _doorway_axis(view: GlobalView | None, door: WorldObject,
                  source: Pose2) -> tuple[float, float]:
    """Unit vector through the doorway, pointing away from the source node.

    The passage axis is the cardinal direction whose neighbor cells are not
    occupied (a door sits in a wall; the wall blocks the other axis). Falls
    back to the axis better aligned with source→door when ambiguous.
    """
    dx, dy = door.pose.x - source.x, door.pose.y - source.y
    if view is None:
        axis = (1.0, 0.0) if abs(dx) >= abs(dy) else (0.0, 1.0)
    else:
        res = view.resolution
        ix = math.floor(door.pose.x / res)
        iy = math.floor(door.pose.y / res)
        x_open = (view.state_at(ix + 1, iy) is not CellState.OCCUPIED
                  and view.state_at(ix - 1, iy) is not CellState.OCCUPIED)
        y_open = (view.state_at(ix, iy + 1) is not CellState.OCCUPIED
                  and view.state_at(ix, iy - 1) is not CellState.OCCUPIED)
        if x_open and not y_open:
            axis = (1.0, 0.0)
        elif y_open and not x_open:
            axis = (0.0, 1.0)
        else:
            axis = (1.0, 0.0) if abs(dx) >= abs(dy) else (0.0, 1.0)
    along = dx * axis[0] + dy * axis[1]
    if along < 0:
        return (-axis[0], -axis[1])
    return axis


def _door_affordance(graph, recorder, node: NodeId, door: WorldObject) -> list[GraphDelta]:
    cfg = recorder.config
    deltas: list[GraphDelta] = []
    source_pose = graph.nodes[node].pose
    ux, uy = _doorway_axis(recorder.view, door, source_pose)
    post_pos = Pose2(door.pose.x + ux * cfg.doorway_offset,
                     door.pose.y + uy * cfg.doorway_offset)
    if recorder.view is not None and not recorder.view.unknown_within(
            post_pos.x, post_pos.y, cfg.prune_radius):
        return deltas  # the far side is already explored; opening gains nothing

    anchor = node
    if door.pose.xy_distance_to(source_pose) > cfg.door_reach:
        # the recording node is too far for the door behavior's reach
        # precondition, so stage a waypoint right in front of the door
        approach = Pose2(door.pose.x - ux * cfg.doorway_offset,
                         door.pose.y - uy * cfg.doorway_offset)
        anchor = _add_node(graph, recorder, deltas, approach,
                           NodeKind.WAYPOINT, "door_approach")
        _connect_goto(graph, recorder, deltas, anchor, prefer=node)

    post = _add_node(graph, recorder, deltas, post_pos, NodeKind.FRONTIER,
                     "door_postcondition")
    _add_edge(graph, deltas, anchor, post, BehaviorKind.OPEN_DOOR,
              {door.id}, cfg.open_door_cost)
    return deltas


# -- frontiers ----------------------------------------------------------------

def extract_frontiers(view: GlobalView, robot_pose: Pose2,
                      recorder: Recorder) -> list[Pose2]:
    """Sample frontier candidates from the global view.

    A frontier cell is FREE with a 4-adjacent UNKNOWN cell (array edges
    count as unknown). Cells cluster by 8-connectivity; clusters of at
    least frontier_min_cluster cells yield one candidate at the centroid
    snapped to the nearest member cell. Candidates within
    frontier_separation of an existing node, or within node_spacing of
    the robot (they would be pruned immediately), are dropped. Output is
    ordered by cluster size descending, then x, then y.
    """
    cfg = recorder.config
    if view is None or view.cells.size == 0:
        return []
    res = view.resolution
    free = view.cells == CellState.FREE
    unknown = np.pad(view.cells == CellState.UNKNOWN, 1, constant_values=True)
    adjacent_unknown = (unknown[:-2, 1:-1] | unknown[2:, 1:-1]
                        | unknown[1:-1, :-2] | unknown[1:-1, 2:])
    mask = free & adjacent_unknown
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=bool))

    graph = recorder.graph
    node_xy = [(graph.nodes[n].pose.x, graph.nodes[n].pose.y) for n in graph.nodes]
    candidates: list[tuple[int, float, float]] = []
    for lbl in range(1, count + 1):
        ys, xs = np.nonzero(labels == lbl)
        if len(xs) < cfg.frontier_min_cluster:
            continue
        wx = (xs + view.ox + 0.5) * res
        wy = (ys + view.oy + 0.5) * res
        cx, cy = wx.mean(), wy.mean()
        d2 = (wx - cx) ** 2 + (wy - cy) ** 2
        snap = np.lexsort((wy, wx, d2))[0]
        x, y = float(wx[snap]), float(wy[snap])
        if math.hypot(x - robot_pose.x, y - robot_pose.y) <= cfg.node_spacing:
            continue
        if any(math.hypot(x - nx, y - ny) < cfg.frontier_separation for nx, ny in node_xy):
            continue
        candidates.append((len(xs), x, y))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    return [Pose2(x, y) for _, x, y in candidates]


# -- pruning ------------------------------------------------------------------

def prune_frontiers(graph: SituationalGraph, view: GlobalView | None,
                    recorder: Recorder) -> list[GraphDelta]:
    """Remove stale FRONTIER nodes (with their incident edges).

    A frontier goes when it has no edges left, when no UNKNOWN cell
    remains within prune_radius of it, or when it lies within
    node_spacing of the robot. The proximity rule spares frontiers
    targeted by a non-goTo edge (a door's postcondition node must survive
    the robot walking up to the door).
    """
    cfg = recorder.config
    deltas: list[GraphDelta] = []
    for nid in sorted(graph.nodes):
        node = graph.nodes.get(nid)
        if node is None or node.kind is not NodeKind.FRONTIER:
            continue
        incident = graph.out_edges(nid) + graph.in_edges(nid)
        if not incident:
            _remove_node(graph, recorder, deltas, nid)
            continue
        if view is not None and not view.unknown_within(node.pose.x, node.pose.y,
                                                        cfg.prune_radius):
            _remove_node(graph, recorder, deltas, nid)
            continue
        exempt = any(e.behavior is not BehaviorKind.GOTO for e in incident)
        if (not exempt and recorder.robot_pose is not None
                and node.pose.distance_to(recorder.robot_pose) < cfg.node_spacing):
            _remove_node(graph, recorder, deltas, nid)
    return deltas
