"""Behavior execution: drive the simulated robot along graph edges.

Straight-line waypoint following is enough for goTo because recording only
creates those edges over corridors it has collision-checked. openDoor holds
still through a fixed manipulation delay, flips the door in the world, then
traverses like goTo. requestTeleop hands control to an operator session and
waits for release.

``EdgeRun`` advances one simulation step per call so the mission loop can
interleave sensing, recording, and command handling between steps. The
module-level ``execute_*`` functions wrap it into blocking calls that sense
on every step themselves; they are the self-contained execution API.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .commands import Command, ReleaseTeleop, SetAutonomy
from .graph import BehaviorKind, DoorState, Edge, EdgeId
from .planning import AutonomyLevel, Plan
from .world import STOP, PerceptionEvent, SensorConfig, WaypointCommand, WorldModel


class ExecutionError(Exception):
    pass


class WrongBehavior(ExecutionError):
    pass


class NotAtSource(ExecutionError):
    pass


class TooFarFromDoor(ExecutionError):
    pass


class DoorMissing(ExecutionError):
    pass


class StalePlan(ExecutionError):
    pass


class ExecStatus(Enum):
    SUCCEEDED = "SUCCEEDED"
    FAILED = "FAILED"
    PREEMPTED = "PREEMPTED"


@dataclass(frozen=True)
class BehaviorOutcome:
    edge: EdgeId
    status: ExecStatus
    steps_taken: int
    detail: str = ""

    @property
    def succeeded(self) -> bool:
        return self.status is ExecStatus.SUCCEEDED

    def to_json(self) -> dict:
        return {"type": "behavior_outcome", "edge": self.edge,
                "status": self.status.value, "steps_taken": self.steps_taken,
                "detail": self.detail}

    @classmethod
    def from_json(cls, data: dict) -> BehaviorOutcome:
        return cls(data["edge"], ExecStatus(data["status"]),
                   data["steps_taken"], data.get("detail", ""))


@dataclass
class ExecutorConfig:
    arrival_tolerance: float = 0.3
    source_tolerance: float = 1.0
    door_reach: float = 1.5
    door_delay_steps: int = 20
    no_progress_steps: int = 20
    no_progress_min: float = 0.05
    teleop_interrupt: str = "after_edge"  # or "immediate"

    def __post_init__(self) -> None:
        for name in ("arrival_tolerance", "source_tolerance", "door_reach",
                     "no_progress_min"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("door_delay_steps", "no_progress_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.teleop_interrupt not in ("immediate", "after_edge"):
            raise ValueError("teleop_interrupt must be 'immediate' or 'after_edge'")


def _resolve(graph, edge: Edge | EdgeId) -> Edge:
    return edge if isinstance(edge, Edge) else graph.edges[edge]


class EdgeRun:
    """One goTo or openDoor edge, advanced one world step per ``step()`` call.

    Source and target poses and the door parameter are resolved against the
    graph once, at construction; graph edits made while the run is in flight
    cannot move the goal out from under it. Door-state events produced by the
    run accumulate in ``pending_events`` for the caller to feed into its next
    recording cycle.
    """

    def __init__(self, world: WorldModel, graph, edge: Edge | EdgeId,
                 config: ExecutorConfig | None = None):
        self.world = world
        self.config = config or ExecutorConfig()
        edge = _resolve(graph, edge)
        if edge.behavior is BehaviorKind.REQUEST_TELEOP:
            raise WrongBehavior("requestTeleop hands control to the operator; "
                                "it cannot be driven as a motion edge")
        self.edge = edge

        pose = world.robot.pose
        source_pose = graph.nodes[edge.source].pose
        if pose.distance_to(source_pose) > self.config.source_tolerance:
            raise NotAtSource(
                f"robot is {pose.distance_to(source_pose):.2f} m from node "
                f"{edge.source}, tolerance {self.config.source_tolerance}")
        self.target_pose = graph.nodes[edge.target].pose

        self.steps_taken = 0
        self.finished = False
        self.pending_events: list[PerceptionEvent] = []
        self._door_id = None
        self._delay_left = 0
        if edge.behavior is BehaviorKind.OPEN_DOOR:
            (door_id,) = edge.object_params
            door = graph.find_object(door_id)
            if door is None:
                raise DoorMissing(f"object {door_id!r} is no longer in the graph")
            reach = door.pose.xy_distance_to(pose)
            if reach > self.config.door_reach:
                raise TooFarFromDoor(f"robot is {reach:.2f} m from door "
                                     f"{door_id!r}, reach {self.config.door_reach}")
            self._door_id = door_id
            world_door = world.doors.get(door_id)
            if world_door is None or world_door.state is DoorState.CLOSED:
                self._delay_left = self.config.door_delay_steps
            # an already-open door needs no manipulation, only the traversal
        self._window: deque[float] = deque(
            [pose.distance_to(self.target_pose)],
            maxlen=self.config.no_progress_steps + 1)

    def step(self) -> BehaviorOutcome | None:
        """One simulation step; the outcome once the run has ended."""
        if self.finished:
            raise ExecutionError("run already finished")
        if self._delay_left > 0:
            self.world.step(STOP)
            self.steps_taken += 1
            self._delay_left -= 1
            if self._delay_left == 0:
                self.pending_events.append(
                    self.world.set_door(self._door_id, DoorState.OPEN))
            return None

        pose = self.world.robot.pose
        if pose.distance_to(self.target_pose) <= self.config.arrival_tolerance:
            return self._finish(ExecStatus.SUCCEEDED)
        self.world.step(WaypointCommand(self.target_pose))
        self.steps_taken += 1
        self._window.append(self.world.robot.pose.distance_to(self.target_pose))
        if (len(self._window) == self._window.maxlen
                and self._window[0] - self._window[-1] <= self.config.no_progress_min):
            return self._finish(ExecStatus.FAILED, "no progress")
        return None

    def preempt(self, detail: str = "operator interrupt") -> BehaviorOutcome:
        return self._finish(ExecStatus.PREEMPTED, detail)

    def _finish(self, status: ExecStatus, detail: str = "") -> BehaviorOutcome:
        self.finished = True
        return BehaviorOutcome(self.edge.id, status, self.steps_taken, detail)


Observer = Callable[[list[PerceptionEvent]], None]


def _seized(command: Command | None) -> bool:
    return (isinstance(command, SetAutonomy)
            and command.level >= AutonomyLevel.L3_OPERATOR_BEHAVIOR)


def _drive(world: WorldModel, run: EdgeRun, sensors: SensorConfig,
           observer: Observer | None, session) -> BehaviorOutcome:
    while True:
        if session is not None:
            command = session.poll()
            if _seized(command):
                return run.preempt(f"autonomy set to L{int(command.level)}")
        before = run.steps_taken
        outcome = run.step()
        if run.steps_taken > before:
            events = list(run.pending_events)
            run.pending_events.clear()
            events.extend(world.sense(sensors))
            if observer is not None:
                observer(events)
        if outcome is not None:
            return outcome


def execute_goto(world: WorldModel, edge: Edge | EdgeId, graph, *,
                 config: ExecutorConfig | None = None,
                 sensors: SensorConfig | None = None,
                 observer: Observer | None = None,
                 session=None) -> BehaviorOutcome:
    """Follow a goTo edge to its target node, sensing every step.

    ``session``, when given, is polled once per step for operator commands;
    a SetAutonomy to L3 or L4 preempts the run before the next motion step.
    """
    edge = _resolve(graph, edge)
    if edge.behavior is not BehaviorKind.GOTO:
        raise WrongBehavior(f"expected goTo, got {edge.behavior.value}")
    run = EdgeRun(world, graph, edge, config)
    return _drive(world, run, sensors or SensorConfig(), observer, session)


def execute_open_door(world: WorldModel, edge: Edge | EdgeId, graph, *,
                      config: ExecutorConfig | None = None,
                      sensors: SensorConfig | None = None,
                      observer: Observer | None = None,
                      session=None) -> BehaviorOutcome:
    """Open the door named by the edge parameter, then traverse to the target.

    The robot must already stand within door reach. A closed door costs a
    fixed manipulation delay before the world flips it; an open one is
    traversed directly.
    """
    edge = _resolve(graph, edge)
    if edge.behavior is not BehaviorKind.OPEN_DOOR:
        raise WrongBehavior(f"expected openDoor, got {edge.behavior.value}")
    run = EdgeRun(world, graph, edge, config)
    return _drive(world, run, sensors or SensorConfig(), observer, session)


def execute_request_teleop(edge: Edge, session) -> BehaviorOutcome:
    """Hand control to the operator and wait.

    ``session.on_request(edge)`` is called once so the owner can notify the
    operator and force L4; ``session.poll()`` is then called once per
    simulation step. ReleaseTeleop or SetAutonomy back to L3 or L4 ends the
    wait as SUCCEEDED; SetAutonomy to L1 or L2 preempts. Anything else,
    including teleop motion itself, is one more step of waiting.
    """
    if edge.behavior is not BehaviorKind.REQUEST_TELEOP:
        raise WrongBehavior(f"expected requestTeleop, got {edge.behavior.value}")
    session.on_request(edge)
    steps = 0
    while True:
        command = session.poll()
        if isinstance(command, ReleaseTeleop):
            return BehaviorOutcome(edge.id, ExecStatus.SUCCEEDED, steps, "released")
        if isinstance(command, SetAutonomy):
            detail = f"autonomy set to L{int(command.level)}"
            if command.level >= AutonomyLevel.L3_OPERATOR_BEHAVIOR:
                return BehaviorOutcome(edge.id, ExecStatus.SUCCEEDED, steps, detail)
            return BehaviorOutcome(edge.id, ExecStatus.PREEMPTED, steps, detail)
        steps += 1


def execute_plan(world: WorldModel, plan: Plan, graph, session=None, *,
                 config: ExecutorConfig | None = None,
                 sensors: SensorConfig | None = None,
                 observer: Observer | None = None,
                 record_cycle: Callable[[], None] | None = None) -> list[BehaviorOutcome]:
    """Execute a plan's edges in order, stopping at the first failure.

    ``record_cycle`` runs after every completed edge so the graph can absorb
    what the traversal revealed before the next edge starts; it may mutate
    the graph, and a plan edge that vanishes under us raises StalePlan.
    """
    outcomes: list[BehaviorOutcome] = []
    for eid in plan.edges:
        if eid not in graph.edges:
            raise StalePlan(f"plan edge {eid} vanished from the graph")
        run = EdgeRun(world, graph, graph.edges[eid], config)
        outcome = _drive(world, run, sensors or SensorConfig(), observer, session)
        outcomes.append(outcome)
        if not outcome.succeeded:
            break
        if record_cycle is not None:
            record_cycle()
    return outcomes
