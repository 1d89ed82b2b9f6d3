"""Mission orchestration.

One loop owns the world, the graph, and every module between them. Each
cycle advances the simulation exactly one step:

    drain commands -> apply -> sense -> observe -> affordances -> prune
                   -> plan -> execute one step

Operator input enters only through the command queue, and everything the
mission does leaves through the event log, so a run is a pure function of
its config plus the timed command script.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .commands import (
    AllocateJob,
    Command,
    ExecuteBehavior,
    Pause,
    ReleaseTeleop,
    Resume,
    SetAutonomy,
    Teleop,
    TimedCommand,
)
from .events import EventLog, LogHeader, MissionEvent
from .executor import BehaviorOutcome, EdgeRun, ExecStatus, ExecutorConfig
from .graph import BehaviorKind, EdgeId, NodeKind, SituationalGraph
from .gridmap import CellState
from .planning import (
    AutonomyLevel,
    Decision,
    ExecuteEdge,
    Idle,
    MissionComplete,
    PlannerState,
    RewardModel,
    planner_tick,
)
from .recording import Recorder, RecorderConfig, apply_affordances, observe, prune_frontiers
from .world import (
    STOP,
    LocalGrid,
    SensorConfig,
    VelocityCommand,
    WaypointCommand,
    WorldModel,
    load_scenario,
)


@dataclass
class MissionConfig:
    scenario: str | Path
    seed: int = 0
    autonomy: AutonomyLevel = AutonomyLevel.L1_FULL_AUTONOMY
    sensors: SensorConfig = field(default_factory=SensorConfig)
    recorder: RecorderConfig = field(default_factory=RecorderConfig)
    executor: ExecutorConfig = field(default_factory=ExecutorConfig)
    rewards: RewardModel = field(default_factory=RewardModel)
    log_path: str | Path | None = None
    step_limit: int = 10_000
    script: tuple[TimedCommand, ...] = ()
    # when set, a new teleop affordance at L1 hands control to the operator
    # (timing per executor.teleop_interrupt) instead of only notifying
    hold_on_teleop_affordance: bool = False

    def __post_init__(self) -> None:
        if self.step_limit < 1:
            raise ValueError("step_limit must be positive")
        self.script = tuple(self.script)

    def scenario_text(self) -> str:
        return Path(self.scenario).read_text(encoding="utf-8")

    def digest(self) -> str:
        """Content hash of everything that determines the run."""
        payload = {
            "scenario": hashlib.sha256(self.scenario_text().encode()).hexdigest(),
            "seed": self.seed,
            "autonomy": int(self.autonomy),
            "sensors": asdict(self.sensors),
            "recorder": asdict(self.recorder),
            "executor": asdict(self.executor),
            "rewards": {"frontier_reward": self.rewards.frontier_reward,
                        "custom_fn": self.rewards.reward_fn is not None},
            "step_limit": self.step_limit,
            "script": [timed.to_json() for timed in self.script],
            "hold_on_teleop_affordance": self.hold_on_teleop_affordance,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class MissionSummary:
    steps: int
    coverage_fraction: float
    frontiers_remaining: int
    outcome: str

    def to_json(self) -> dict:
        return {"steps": self.steps, "coverage_fraction": self.coverage_fraction,
                "frontiers_remaining": self.frontiers_remaining,
                "outcome": self.outcome}


@dataclass
class _TeleopHold:
    """An in-flight requestTeleop edge: who to report and where to return."""

    edge: EdgeId
    saved_level: AutonomyLevel
    steps_waited: int = 0


class Mission:
    """One simulated mission; call step() once per simulation step."""

    def __init__(self, config: MissionConfig, *, world: WorldModel | None = None):
        self.config = config
        if world is None:
            world = load_scenario(config.scenario_text(), rng_seed=config.seed)
        self.world = world
        self.graph = SituationalGraph()
        self.recorder = Recorder(self.graph, config.recorder)
        self.state = PlannerState(level=config.autonomy)
        self.log = EventLog(config.log_path,
                            LogHeader(config.digest(), world.name, config.seed))
        self.listeners: list[Callable[[MissionEvent], None]] = []
        self.seq = 0
        self.paused = False
        self.complete = False
        self.run: EdgeRun | None = None
        self.hold: _TeleopHold | None = None
        self.queue: deque[Command] = deque()
        self.teleop_velocity: VelocityCommand | None = None
        self.level_before_teleop = (AutonomyLevel.L1_FULL_AUTONOMY
                                    if config.autonomy is AutonomyLevel.L4_TELEOP
                                    else config.autonomy)
        self.operator_edge: EdgeId | None = None
        self.pending_hold: EdgeId | None = None
        self._script = deque(sorted(config.script, key=lambda timed: timed.step))
        self._pending_perception: list = []
        self._approach_window: deque[float] = deque(maxlen=31)
        self._last_decision: dict | None = None
        self._step_no = 0

    # -- plumbing -----------------------------------------------------------

    def submit(self, command: Command) -> None:
        """Queue an operator command for the next cycle's drain."""
        self.queue.append(command)

    def _emit(self, kind: str, payload: dict) -> MissionEvent:
        self.seq += 1
        event = MissionEvent(self.seq, self._step_no, kind, payload)
        self.log.append(event)
        for listener in self.listeners:
            listener(event)
        return event

    def _emit_outcome(self, outcome: BehaviorOutcome) -> None:
        self._emit("behavior_outcome", outcome.to_json())

    def _emit_decision(self, decision: Decision) -> None:
        if isinstance(decision, ExecuteEdge):
            payload = {"decision": "execute_edge", "edge": decision.edge}
        elif isinstance(decision, Idle):
            payload = {"decision": "idle", "reason": decision.reason}
        else:
            payload = {"decision": "mission_complete"}
        if payload != self._last_decision:
            self._last_decision = payload
            self._emit("decision", payload)

    def _reject(self, command: Command, reason: str) -> None:
        self._emit("notification", {"kind": "rejected",
                                    "command": command.to_json(), "reason": reason})

    # -- the loop -----------------------------------------------------------

    def step(self) -> bool:
        """One mission cycle; False once the mission has completed."""
        if self.complete:
            return False
        self._step_no = self.world.step_index
        self._drain_commands()
        if self.paused:
            self.world.step(STOP)
            return True
        self._sense_and_record()
        self._act()
        return not self.complete

    def _drain_commands(self) -> None:
        while self._script and self._script[0].step <= self._step_no:
            self.queue.append(self._script.popleft().command)
        while self.queue:
            self._apply_command(self.queue.popleft())

    # -- commands -----------------------------------------------------------

    def _apply_command(self, command: Command) -> None:
        if isinstance(command, SetAutonomy):
            self._emit("command", {"command": command.to_json(), "accepted": True})
            self._set_level(command.level)
        elif isinstance(command, AllocateJob):
            reason = None
            if self.state.level is not AutonomyLevel.L2_OPERATOR_JOBS:
                reason = "requires level 2"
            elif command.node not in self.graph.nodes:
                reason = f"unknown node {command.node}"
            self._emit("command", {"command": command.to_json(),
                                   "accepted": reason is None})
            if reason is not None:
                self._reject(command, reason)
                return
            self.state.operator_job = command.node
            self.state.drop_plan()
        elif isinstance(command, ExecuteBehavior):
            reason = None
            if self.state.level is not AutonomyLevel.L3_OPERATOR_BEHAVIOR:
                reason = "requires level 3"
            elif command.edge not in self.graph.edges:
                reason = f"unknown edge {command.edge}"
            elif self.graph.edges[command.edge].source != self.state.current:
                reason = "edge not available at the current node"
            elif self.run is not None or self.operator_edge is not None:
                reason = "a behavior is already executing"
            self._emit("command", {"command": command.to_json(),
                                   "accepted": reason is None})
            if reason is not None:
                self._reject(command, reason)
                return
            self.operator_edge = command.edge
        elif isinstance(command, Teleop):
            accepted = self.state.level is AutonomyLevel.L4_TELEOP
            self._emit("command", {"command": command.to_json(), "accepted": accepted})
            if not accepted:
                self._reject(command, "requires level 4")
                return
            self.teleop_velocity = VelocityCommand(command.vx, command.vy, command.wz)
        elif isinstance(command, ReleaseTeleop):
            accepted = self.state.level is AutonomyLevel.L4_TELEOP
            self._emit("command", {"command": command.to_json(), "accepted": accepted})
            if not accepted:
                self._reject(command, "not in teleoperation")
                return
            if self.hold is not None:
                hold, self.hold = self.hold, None
                self._emit_outcome(BehaviorOutcome(
                    hold.edge, ExecStatus.SUCCEEDED, hold.steps_waited, "released"))
                self._change_level(hold.saved_level)
            else:
                self._change_level(self.level_before_teleop)
        elif isinstance(command, Pause):
            self._emit("command", {"command": command.to_json(), "accepted": True})
            self.paused = True
        elif isinstance(command, Resume):
            self._emit("command", {"command": command.to_json(), "accepted": True})
            self.paused = False

    def _set_level(self, level: AutonomyLevel) -> None:
        if self.hold is not None:
            hold, self.hold = self.hold, None
            detail = f"autonomy set to L{int(level)}"
            status = (ExecStatus.SUCCEEDED
                      if level >= AutonomyLevel.L3_OPERATOR_BEHAVIOR
                      else ExecStatus.PREEMPTED)
            self._emit_outcome(BehaviorOutcome(hold.edge, status,
                                               hold.steps_waited, detail))
        elif self.run is not None and level >= AutonomyLevel.L3_OPERATOR_BEHAVIOR:
            self._finish_run(self.run.preempt(f"autonomy set to L{int(level)}"))
        self._change_level(level)

    def _change_level(self, level: AutonomyLevel) -> None:
        old = self.state.level
        if level is old:
            return
        if level is AutonomyLevel.L4_TELEOP:
            self.level_before_teleop = old
        else:
            self.teleop_velocity = None
        if level >= AutonomyLevel.L3_OPERATOR_BEHAVIOR:
            self.state.drop_plan()
        if level is not AutonomyLevel.L3_OPERATOR_BEHAVIOR:
            self.operator_edge = None
        self.state.level = level
        self._emit("autonomy_changed", {"level": int(level), "previous": int(old)})

    # -- recording ----------------------------------------------------------

    def _sense_and_record(self) -> None:
        events = self._pending_perception
        self._pending_perception = []
        if self.run is not None and self.run.pending_events:
            # e.g. the door flip from an in-flight openDoor: record it the
            # cycle it happened, not when the run finishes
            events = events + list(self.run.pending_events)
            self.run.pending_events.clear()
        events = events + self.world.sense(self.config.sensors)
        for event in events:
            if not isinstance(event, LocalGrid):  # grids ride graph deltas instead
                self._emit("perception", event.to_json())
        deltas = observe(self.graph, self.recorder, events)
        # prune before affordances: a stale frontier must not suppress the
        # cluster that replaces it, or the planner sees a transient empty
        # frontier set and declares the mission over
        deltas.extend(prune_frontiers(self.graph, self.recorder.view, self.recorder))
        current = self.recorder.current_node
        if current is not None:
            deltas.extend(apply_affordances(self.graph, self.recorder, current))
        for delta in deltas:
            self._emit("graph_delta", delta.to_json())
        for note in self.recorder.drain_notifications():
            self._emit("notification", note)
            if (note.get("kind") == "teleop_affordance"
                    and self.config.hold_on_teleop_affordance
                    and self.state.level is AutonomyLevel.L1_FULL_AUTONOMY):
                self.pending_hold = note["edge"]
        self.state.current = current

    # -- acting -------------------------------------------------------------

    def _act(self) -> None:
        before = self.world.step_index
        self._act_logic()
        if not self.complete and self.world.step_index == before:
            self.world.step(STOP)

    def _act_logic(self) -> None:
        self._activate_pending_holds()

        if self.state.level is AutonomyLevel.L4_TELEOP:
            self._emit_decision(Idle("operator control"))
            if self.hold is not None:
                self.hold.steps_waited += 1
            command = self.teleop_velocity or STOP
            self.teleop_velocity = None
            self.world.step(command)
            return

        if self.run is not None:
            # an openDoor edge legitimately vanishes mid-run: seeing the door
            # open drops it from the graph, but the run still has to deliver
            # the robot to the postcondition node
            invalidated = (self.run.edge.id not in self.graph.edges
                           and self.run.edge.behavior is not BehaviorKind.OPEN_DOOR)
            if invalidated:
                self._finish_run(self.run.preempt("edge removed from graph"))
            else:
                before = self.world.step_index
                outcome = self.run.step()
                if outcome is None:
                    return
                self._finish_run(outcome)
                if self.world.step_index > before:
                    return
                # arrived without needing to move; pick fresh work this cycle

        if self.state.level is AutonomyLevel.L3_OPERATOR_BEHAVIOR:
            self._emit_decision(Idle("operator control"))
            if self.operator_edge is not None:
                edge_id, self.operator_edge = self.operator_edge, None
                self._begin_edge(edge_id, operator=True)
            return

        result = planner_tick(self.graph, self.state, self.config.rewards)
        if result.new_plan is not None or result.new_job is not None:
            self._emit("plan", {
                "plan": result.new_plan.to_json() if result.new_plan else None,
                "job": result.new_job.to_json() if result.new_job else None})
        if result.no_path_to is not None:
            self._emit("notification", {"kind": "no_path", "target": result.no_path_to})
        self._emit_decision(result.decision)
        if isinstance(result.decision, MissionComplete):
            self.complete = True
            self._emit("mission_complete", self.summary("MissionComplete").to_json())
        elif isinstance(result.decision, ExecuteEdge):
            self._begin_edge(result.decision.edge, operator=False)

    def _activate_pending_holds(self) -> None:
        if self.operator_edge is not None:
            edge = self.graph.edges.get(self.operator_edge)
            if edge is not None and edge.behavior is BehaviorKind.REQUEST_TELEOP:
                edge_id, self.operator_edge = self.operator_edge, None
                self._start_hold(edge_id)
        if self.pending_hold is not None and self.hold is None:
            if self.run is not None:
                if self.config.executor.teleop_interrupt != "immediate":
                    return  # after_edge: wait for the current run to finish
                self._finish_run(self.run.preempt("teleop requested"))
            edge_id, self.pending_hold = self.pending_hold, None
            if edge_id in self.graph.edges:
                self._start_hold(edge_id)

    def _start_hold(self, edge_id: EdgeId) -> None:
        edge = self.graph.edges.get(edge_id)
        params = sorted(edge.object_params) if edge is not None else []
        self._emit("notification", {"kind": "teleop_requested", "edge": edge_id,
                                    "object": params[0] if params else None})
        self.hold = _TeleopHold(edge_id, saved_level=self.state.level)
        self._change_level(AutonomyLevel.L4_TELEOP)

    def _begin_edge(self, edge_id: EdgeId, *, operator: bool) -> None:
        edge = self.graph.edges.get(edge_id)
        if edge is None:
            if operator:
                self._emit("notification", {
                    "kind": "rejected",
                    "command": {"type": "execute_behavior", "edge": edge_id},
                    "reason": "edge vanished before execution"})
            return
        source_pose = self.graph.nodes[edge.source].pose
        gap = self.world.robot.pose.distance_to(source_pose)
        if gap > self.config.executor.arrival_tolerance:
            self._approach(edge_id, source_pose, gap, operator)
            return
        self._approach_window.clear()
        self.run = EdgeRun(self.world, self.graph, edge, self.config.executor)
        outcome = self.run.step()
        if outcome is not None:
            self._finish_run(outcome)

    def _approach(self, edge_id: EdgeId, source_pose, gap: float, operator: bool) -> None:
        """Walk back onto the edge's source node before starting the run."""
        window = self._approach_window
        window.append(gap)
        if len(window) == window.maxlen and window[0] - window[-1] <= 0.05:
            window.clear()
            self.state.drop_plan()
            self._emit("notification", {"kind": "approach_stalled", "edge": edge_id})
            return
        if operator:
            self.operator_edge = edge_id  # keep it pending for the next cycle
        self.world.step(WaypointCommand(source_pose))

    def _finish_run(self, outcome: BehaviorOutcome) -> None:
        run, self.run = self.run, None
        if run is not None:
            self._pending_perception.extend(run.pending_events)
            run.pending_events.clear()
        self._emit_outcome(outcome)
        plan = self.state.active_plan
        if (outcome.status is ExecStatus.SUCCEEDED and plan is not None
                and self.state.plan_index < len(plan.edges)
                and plan.edges[self.state.plan_index] == outcome.edge):
            self.state.plan_index += 1
        elif outcome.status is not ExecStatus.SUCCEEDED:
            self.state.drop_plan()

    # -- reporting ----------------------------------------------------------

    def coverage_fraction(self) -> float:
        mask = self.world.reachable_floor()
        total = int(mask.sum())
        view = self.recorder.view
        if total == 0 or view is None:
            return 0.0
        covered = 0
        for iy, ix in zip(*np.nonzero(mask)):
            if view.state_at(int(ix), int(iy)) is CellState.FREE:
                covered += 1
        return covered / total

    def frontiers_remaining(self) -> int:
        return sum(1 for node in self.graph.nodes.values()
                   if node.kind is NodeKind.FRONTIER)

    def summary(self, outcome: str) -> MissionSummary:
        return MissionSummary(self.world.step_index, self.coverage_fraction(),
                              self.frontiers_remaining(), outcome)

    def close(self) -> None:
        self.log.close()


def run_mission(config: MissionConfig, *, world: WorldModel | None = None,
                on_cycle: Callable[[Mission], None] | None = None) -> MissionSummary:
    """Run headlessly until completion or the step limit."""
    mission = Mission(config, world=world)
    try:
        outcome = "StepLimit"
        while mission.world.step_index < config.step_limit:
            alive = mission.step()
            if on_cycle is not None:
                on_cycle(mission)
            if not alive:
                outcome = "MissionComplete"
                break
        summary = mission.summary(outcome)
    finally:
        mission.close()
    return summary
