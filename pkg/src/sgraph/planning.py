"""Job selection and path planning over graph snapshots.

The planner is a pure reader: it consumes a GraphSnapshot and produces
plans (ordered behavior edge sequences), jobs (net-value-ranked frontier
targets), and per-tick decisions for the mission loop. requestTeleop
edges are never planned through; teleoperation is always operator
initiated.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable

from .graph import (
    BehaviorKind,
    EdgeId,
    GraphSnapshot,
    Node,
    NodeId,
    NodeKind,
    UnknownNode,
)


class AutonomyLevel(IntEnum):
    L1_FULL_AUTONOMY = 1
    L2_OPERATOR_JOBS = 2
    L3_OPERATOR_BEHAVIOR = 3
    L4_TELEOP = 4


class PlanningError(Exception):
    pass


class NoPath(PlanningError):
    pass


@dataclass(frozen=True)
class Plan:
    """An acyclic edge sequence from start to goal with its summed cost."""

    edges: tuple[EdgeId, ...]
    total_cost: float
    start: NodeId
    goal: NodeId

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "goal": self.goal,
            "edges": list(self.edges),
            "total_cost": self.total_cost,
        }

    @classmethod
    def from_json(cls, data: dict) -> Plan:
        return cls(tuple(data["edges"]), data["total_cost"], data["start"], data["goal"])


@dataclass(frozen=True)
class Job:
    """A candidate target with its expected reward and travel cost."""

    target: NodeId
    reward: float
    cost: float

    @property
    def net(self) -> float:
        return self.reward - self.cost

    def to_json(self) -> dict:
        return {"target": self.target, "reward": self.reward,
                "cost": self.cost, "net": self.net}


@dataclass
class RewardModel:
    """Reward per node: flat value for frontiers, zero elsewhere, with an
    optional override hook."""

    frontier_reward: float = 50.0
    reward_fn: Callable[[Node], float] | None = None

    def reward_for(self, node: Node) -> float:
        if self.reward_fn is not None:
            return self.reward_fn(node)
        if node.kind is NodeKind.FRONTIER:
            return self.frontier_reward
        return 0.0


@dataclass(frozen=True)
class ExecuteEdge:
    edge: EdgeId


@dataclass(frozen=True)
class Idle:
    reason: str = ""


@dataclass(frozen=True)
class MissionComplete:
    pass


Decision = ExecuteEdge | Idle | MissionComplete


@dataclass
class PlannerState:
    """Mutable planner bookkeeping carried across mission ticks."""

    level: AutonomyLevel = AutonomyLevel.L1_FULL_AUTONOMY
    current: NodeId | None = None
    active_plan: Plan | None = None
    plan_index: int = 0
    operator_job: NodeId | None = None

    def drop_plan(self) -> None:
        self.active_plan = None
        self.plan_index = 0


@dataclass(frozen=True)
class TickResult:
    """A decision plus what changed while making it (for event logging)."""

    decision: Decision
    new_plan: Plan | None = None
    new_job: Job | None = None
    no_path_to: NodeId | None = None


def plan_path(snapshot: GraphSnapshot, source: NodeId, target: NodeId) -> Plan:
    """Cheapest behavior-edge path, excluding requestTeleop edges.

    Ties on cost resolve to the lexicographically smallest edge-id tuple:
    with strictly positive costs two equal-cost paths are never prefixes
    of one another, so ordering heap entries by (cost, edge ids) settles
    every node through its lexicographically smallest optimal path.
    """
    if source not in snapshot.nodes:
        raise UnknownNode(f"node {source} not in snapshot")
    if target not in snapshot.nodes:
        raise UnknownNode(f"node {target} not in snapshot")
    if source == target:
        return Plan((), 0.0, source, target)

    adjacency: dict[NodeId, list] = {}
    for eid in sorted(snapshot.edges):
        edge = snapshot.edges[eid]
        if edge.behavior is BehaviorKind.REQUEST_TELEOP:
            continue
        adjacency.setdefault(edge.source, []).append(edge)

    heap: list[tuple[float, tuple[EdgeId, ...], NodeId]] = [(0.0, (), source)]
    settled: set[NodeId] = set()
    while heap:
        cost, path, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        if node == target:
            return Plan(path, cost, source, target)
        for edge in adjacency.get(node, ()):
            if edge.target in settled:
                continue
            heapq.heappush(heap, (cost + edge.cost, path + (edge.id,), edge.target))
    raise NoPath(f"no path from {source} to {target}")


def reachable_costs(snapshot: GraphSnapshot, source: NodeId) -> dict[NodeId, float]:
    """Cheapest cost from source to every reachable node (teleop excluded)."""
    if source not in snapshot.nodes:
        raise UnknownNode(f"node {source} not in snapshot")
    adjacency: dict[NodeId, list] = {}
    for edge in snapshot.edges.values():
        if edge.behavior is not BehaviorKind.REQUEST_TELEOP:
            adjacency.setdefault(edge.source, []).append(edge)

    costs = {source: 0.0}
    settled: set[NodeId] = set()
    heap: list[tuple[float, NodeId]] = [(0.0, source)]
    while heap:
        cost, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        for edge in adjacency.get(node, ()):
            nxt = edge.target
            through = cost + edge.cost
            if nxt not in costs or through < costs[nxt]:
                costs[nxt] = through
                heapq.heappush(heap, (through, nxt))
    return costs


def select_job(snapshot: GraphSnapshot, current: NodeId,
               rewards: RewardModel | None = None) -> Job | None:
    """Highest-net reachable frontier job, or None when no job pays.

    Net value is reward minus travel cost; ties go to the lowest node id.
    """
    rewards = rewards or RewardModel()
    costs = reachable_costs(snapshot, current)
    best: Job | None = None
    for nid in sorted(snapshot.nodes):
        node = snapshot.nodes[nid]
        if node.kind is not NodeKind.FRONTIER or nid not in costs:
            continue
        job = Job(nid, rewards.reward_for(node), costs[nid])
        if job.net <= 0:
            continue
        if best is None or job.net > best.net:
            best = job
    return best


def replan_on_delta(state: PlannerState, snapshot: GraphSnapshot) -> bool:
    """Drop the active plan when the graph no longer contains it."""
    plan = state.active_plan
    if plan is None:
        return False
    stale = plan.goal not in snapshot.nodes or any(
        eid not in snapshot.edges for eid in plan.edges)
    if stale:
        state.drop_plan()
    return stale


def planner_tick(snapshot: GraphSnapshot, state: PlannerState,
                 rewards: RewardModel | None = None) -> TickResult:
    """One planning decision for the mission loop.

    L1 selects frontier jobs and plans toward them; L2 plans toward the
    operator's allocated job; L3/L4 always idle (the operator drives).
    Stale or diverged plans are dropped and replaced.
    """
    if state.level in (AutonomyLevel.L3_OPERATOR_BEHAVIOR, AutonomyLevel.L4_TELEOP):
        return TickResult(Idle("operator control"))
    if state.current is None:
        return TickResult(Idle("no current node"))
    current = state.current

    replan_on_delta(state, snapshot)
    plan = state.active_plan
    if plan is not None:
        if state.plan_index >= len(plan.edges):
            state.drop_plan()
            if state.level is AutonomyLevel.L2_OPERATOR_JOBS and state.operator_job == current:
                state.operator_job = None
                return TickResult(Idle("job complete"))
        else:
            next_edge = plan.edges[state.plan_index]
            if snapshot.edges[next_edge].source != current:
                state.drop_plan()  # robot diverged from the plan
            else:
                return TickResult(ExecuteEdge(next_edge))

    if state.level is AutonomyLevel.L1_FULL_AUTONOMY:
        job = select_job(snapshot, current, rewards)
        if job is None:
            return TickResult(MissionComplete())
        plan = plan_path(snapshot, current, job.target)
        if not plan.edges:
            return TickResult(Idle("at goal"), new_job=job)
        state.active_plan = plan
        state.plan_index = 0
        return TickResult(ExecuteEdge(plan.edges[0]), new_plan=plan, new_job=job)

    # L2: operator-allocated jobs
    if state.operator_job is None:
        return TickResult(Idle("awaiting job"))
    if state.operator_job == current:
        state.operator_job = None
        return TickResult(Idle("job complete"))
    try:
        plan = plan_path(snapshot, current, state.operator_job)
    except (NoPath, UnknownNode):  # the job node may have been pruned
        unreachable = state.operator_job
        state.operator_job = None
        return TickResult(Idle("job unreachable"), no_path_to=unreachable)
    state.active_plan = plan
    state.plan_index = 0
    return TickResult(ExecuteEdge(plan.edges[0]), new_plan=plan)
