"""Situational graph: places, their recorded situations, and behavior edges.

A node couples a pose with the situation observed there (local grid plus
detected objects). Edges are behaviors that move the robot between nodes;
goTo edges are kept as directed pairs so traversability stays symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .geometry import Pose2, Pose3
from .gridmap import GridMap

NodeId = int
EdgeId = int
ObjectId = str


class ObjectLabel(str, Enum):
    DOOR = "door"
    CONTAINER = "container"
    PERSON = "person"
    FRONTIER = "frontier"


class DoorState(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


class NodeKind(str, Enum):
    WAYPOINT = "waypoint"
    FRONTIER = "frontier"


class BehaviorKind(str, Enum):
    GOTO = "goTo"
    OPEN_DOOR = "openDoor"
    REQUEST_TELEOP = "requestTeleop"


class GraphError(Exception):
    pass


class UnknownNode(GraphError):
    pass


class UnknownEdge(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class InvariantViolation(GraphError):
    pass


class EmptyGraph(GraphError):
    pass


@dataclass(frozen=True)
class WorldObject:
    """A detected object. Doors always carry a state; nothing else may."""

    id: ObjectId
    label: ObjectLabel
    pose: Pose3
    state: DoorState | None = None

    def __post_init__(self) -> None:
        if self.label is ObjectLabel.DOOR and self.state is None:
            raise InvariantViolation(f"door {self.id!r} must carry a state")
        if self.label is not ObjectLabel.DOOR and self.state is not None:
            raise InvariantViolation(f"{self.label.value} {self.id!r} cannot carry a state")

    def to_json(self) -> dict:
        data = {"id": self.id, "label": self.label.value, "pose": self.pose.to_json()}
        if self.state is not None:
            data["state"] = self.state.value
        return data

    @classmethod
    def from_json(cls, data: dict) -> WorldObject:
        state = DoorState(data["state"]) if "state" in data else None
        return cls(data["id"], ObjectLabel(data["label"]), Pose3.from_json(data["pose"]), state)


@dataclass
class Situation:
    """What was observed at a place: a local grid and the objects in it."""

    gridmap: GridMap
    objects: dict[ObjectId, WorldObject] = field(default_factory=dict)

    @classmethod
    def empty(cls, resolution: float = 0.5) -> Situation:
        return cls(GridMap.empty(0, 0, resolution, Pose2(0.0, 0.0)))

    @classmethod
    def of(cls, gridmap: GridMap, objects: list[WorldObject] | dict[ObjectId, WorldObject] = ()) -> Situation:
        if isinstance(objects, dict):
            keyed = dict(objects)
        else:
            keyed = {}
            for obj in objects:
                keyed[obj.id] = obj  # last write wins, ids stay distinct
        return cls(gridmap, keyed)

    def copy(self) -> Situation:
        return Situation(self.gridmap.copy(), dict(self.objects))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Situation):
            return NotImplemented
        return self.gridmap == other.gridmap and self.objects == other.objects


@dataclass
class Node:
    id: NodeId
    pose: Pose2
    situation: Situation
    kind: NodeKind


@dataclass(frozen=True)
class Edge:
    id: EdgeId
    source: NodeId
    target: NodeId
    behavior: BehaviorKind
    object_params: frozenset[ObjectId]
    cost: float

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "target": self.target,
            "behavior": self.behavior.value,
            "object_params": sorted(self.object_params),
            "cost": self.cost,
        }

    @classmethod
    def from_json(cls, data: dict) -> Edge:
        return cls(
            data["id"],
            data["source"],
            data["target"],
            BehaviorKind(data["behavior"]),
            frozenset(data["object_params"]),
            data["cost"],
        )


def _edge_key(source: NodeId, target: NodeId, behavior: BehaviorKind, params: frozenset[ObjectId]):
    return (source, target, behavior, params)


class SituationalGraph:
    """Mutable directed multigraph with monotone ids and a revision counter.

    Single-writer: the recorder owns mutation; everyone else reads via
    snapshot(). Every public mutating call bumps revision by exactly one.
    """

    def __init__(self) -> None:
        self.nodes: dict[NodeId, Node] = {}
        self.edges: dict[EdgeId, Edge] = {}
        self.revision = 0
        self._next_node: NodeId = 1
        self._next_edge: EdgeId = 1
        self._out: dict[NodeId, list[EdgeId]] = {}
        self._in: dict[NodeId, list[EdgeId]] = {}
        self._pair: dict[EdgeId, EdgeId] = {}
        self._keys: set[tuple] = set()

    # -- mutation ---------------------------------------------------------

    def add_node(self, pose: Pose2, kind: NodeKind = NodeKind.WAYPOINT,
                 situation: Situation | None = None) -> NodeId:
        if situation is None:
            situation = Situation.empty()
        if kind is NodeKind.FRONTIER:
            if situation.objects or not situation.gridmap.all_unknown():
                raise InvariantViolation("frontier nodes start with an unknown situation")
        nid = self._next_node
        self._next_node += 1
        self.nodes[nid] = Node(nid, pose, situation, kind)
        self._out[nid] = []
        self._in[nid] = []
        self.revision += 1
        return nid

    def add_edge(self, source: NodeId, target: NodeId, behavior: BehaviorKind,
                 object_params: frozenset[ObjectId] | set[ObjectId] | tuple = (),
                 cost: float = 0.0) -> EdgeId:
        """Insert an edge; goTo edges are stored as a directed pair sharing cost.

        Returns the forward edge id (paired_edge() finds the reverse one).
        """
        params = frozenset(object_params)
        if source not in self.nodes:
            raise UnknownNode(f"node {source} not in graph")
        if target not in self.nodes:
            raise UnknownNode(f"node {target} not in graph")
        if cost < 0:
            raise InvariantViolation(f"edge cost must be >= 0, got {cost}")

        if behavior is BehaviorKind.GOTO:
            if params:
                raise InvariantViolation("goTo edges take no object params")
            if source == target:
                raise InvariantViolation("goTo edges cannot be self-loops")
        elif behavior is BehaviorKind.OPEN_DOOR:
            if len(params) != 1:
                raise InvariantViolation("openDoor edges take exactly one object param")
            (door_id,) = params
            obj = self.find_object(door_id)
            if obj is None or obj.label is not ObjectLabel.DOOR:
                raise InvariantViolation(f"openDoor param {door_id!r} is not a known door")
        elif behavior is BehaviorKind.REQUEST_TELEOP:
            if source != target:
                raise InvariantViolation("requestTeleop edges are self-loops")
            if len(params) != 1:
                raise InvariantViolation("requestTeleop edges take exactly one object param")

        key = _edge_key(source, target, behavior, params)
        if key in self._keys:
            raise DuplicateEdge(f"edge {key} already present")
        if behavior is BehaviorKind.GOTO and _edge_key(target, source, behavior, params) in self._keys:
            raise DuplicateEdge(f"reverse goTo edge for {key} already present")

        forward = self._insert(source, target, behavior, params, cost)
        if behavior is BehaviorKind.GOTO:
            reverse = self._insert(target, source, behavior, params, cost)
            self._pair[forward] = reverse
            self._pair[reverse] = forward
        self.revision += 1
        return forward

    def _insert(self, source, target, behavior, params, cost) -> EdgeId:
        eid = self._next_edge
        self._next_edge += 1
        self.edges[eid] = Edge(eid, source, target, behavior, params, cost)
        self._out[source].append(eid)
        self._in[target].append(eid)
        self._keys.add(_edge_key(source, target, behavior, params))
        return eid

    def remove_edge(self, edge: EdgeId) -> tuple[EdgeId, ...]:
        """Remove an edge (and its paired reverse goTo). Returns removed ids."""
        if edge not in self.edges:
            raise UnknownEdge(f"edge {edge} not in graph")
        removed = [edge]
        mate = self._pair.get(edge)
        if mate is not None:
            removed.append(mate)
        for eid in removed:
            self._delete(eid)
        self.revision += 1
        return tuple(removed)

    def _delete(self, eid: EdgeId) -> None:
        e = self.edges.pop(eid)
        self._out[e.source].remove(eid)
        self._in[e.target].remove(eid)
        self._keys.discard(_edge_key(e.source, e.target, e.behavior, e.object_params))
        self._pair.pop(eid, None)

    def remove_node(self, node: NodeId) -> tuple[EdgeId, ...]:
        """Remove a node together with every incident edge."""
        if node not in self.nodes:
            raise UnknownNode(f"node {node} not in graph")
        incident = sorted(set(self._out[node]) | set(self._in[node]))
        for eid in incident:
            self._delete(eid)
        del self.nodes[node]
        del self._out[node]
        del self._in[node]
        self.revision += 1
        return tuple(incident)

    def update_situation(self, node: NodeId, gridmap: GridMap,
                         objects: list[WorldObject] | dict[ObjectId, WorldObject] = ()) -> None:
        """Replace a node's situation wholesale (objects keyed by id)."""
        if node not in self.nodes:
            raise UnknownNode(f"node {node} not in graph")
        self.nodes[node].situation = Situation.of(gridmap, objects)
        self.revision += 1

    def set_node_kind(self, node: NodeId, kind: NodeKind) -> None:
        if node not in self.nodes:
            raise UnknownNode(f"node {node} not in graph")
        self.nodes[node].kind = kind
        self.revision += 1

    # -- queries ----------------------------------------------------------

    def nearest_node(self, pose: Pose2) -> tuple[NodeId, float]:
        """Closest node by planar distance; ties go to the lowest id."""
        if not self.nodes:
            raise EmptyGraph("graph has no nodes")
        best_id, best_dist = -1, float("inf")
        for nid in sorted(self.nodes):
            d = self.nodes[nid].pose.distance_to(pose)
            if d < best_dist:
                best_id, best_dist = nid, d
        return best_id, best_dist

    def out_edges(self, node: NodeId) -> list[Edge]:
        if node not in self.nodes:
            raise UnknownNode(f"node {node} not in graph")
        return [self.edges[eid] for eid in sorted(self._out[node])]

    def in_edges(self, node: NodeId) -> list[Edge]:
        if node not in self.nodes:
            raise UnknownNode(f"node {node} not in graph")
        return [self.edges[eid] for eid in sorted(self._in[node])]

    def paired_edge(self, edge: EdgeId) -> EdgeId | None:
        return self._pair.get(edge)

    def find_object(self, object_id: ObjectId) -> WorldObject | None:
        """First occurrence of an object across node situations (id order)."""
        for nid in sorted(self.nodes):
            obj = self.nodes[nid].situation.objects.get(object_id)
            if obj is not None:
                return obj
        return None

    def nodes_with_object(self, object_id: ObjectId) -> list[NodeId]:
        return [nid for nid in sorted(self.nodes) if object_id in self.nodes[nid].situation.objects]

    def snapshot(self) -> GraphSnapshot:
        nodes = {
            nid: Node(n.id, n.pose, n.situation.copy(), n.kind)
            for nid, n in self.nodes.items()
        }
        return GraphSnapshot(nodes=nodes, edges=dict(self.edges), revision=self.revision)


@dataclass
class GraphSnapshot:
    """Immutable, revision-tagged copy of the graph for readers."""

    nodes: dict[NodeId, Node]
    edges: dict[EdgeId, Edge]
    revision: int

    def out_edges(self, node: NodeId) -> list[Edge]:
        if node not in self.nodes:
            raise UnknownNode(f"node {node} not in snapshot")
        found = [e for e in self.edges.values() if e.source == node]
        found.sort(key=lambda e: e.id)
        return found

    def to_json(self, include_gridmaps: bool = False) -> dict:
        nodes_out = []
        for nid in sorted(self.nodes):
            node = self.nodes[nid]
            entry = {
                "id": node.id,
                "kind": node.kind.value,
                "pose": node.pose.to_json(),
                "objects": [node.situation.objects[oid].to_json()
                            for oid in sorted(node.situation.objects)],
            }
            if include_gridmaps:
                entry["gridmap"] = node.situation.gridmap.to_json()
            nodes_out.append(entry)
        edges_out = [self.edges[eid].to_json() for eid in sorted(self.edges)]
        return {"revision": self.revision, "nodes": nodes_out, "edges": edges_out}

    @classmethod
    def from_json(cls, data: dict) -> GraphSnapshot:
        nodes: dict[NodeId, Node] = {}
        for entry in data["nodes"]:
            if "gridmap" in entry:
                gridmap = GridMap.from_json(entry["gridmap"])
            else:
                gridmap = Situation.empty().gridmap
            objects = [WorldObject.from_json(o) for o in entry["objects"]]
            nodes[entry["id"]] = Node(
                entry["id"],
                Pose2.from_json(entry["pose"]),
                Situation.of(gridmap, objects),
                NodeKind(entry["kind"]),
            )
        edges = {e["id"]: Edge.from_json(e) for e in data["edges"]}
        return cls(nodes=nodes, edges=edges, revision=data["revision"])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphSnapshot):
            return NotImplemented
        if self.revision != other.revision or self.edges != other.edges:
            return False
        if set(self.nodes) != set(other.nodes):
            return False
        for nid, node in self.nodes.items():
            theirs = other.nodes[nid]
            if (node.pose, node.kind) != (theirs.pose, theirs.kind):
                return False
            if node.situation != theirs.situation:
                return False
        return True
