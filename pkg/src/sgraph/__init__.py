"""Behavior-centric situational-graph missions for a simulated indoor robot."""

from .commands import (
    AllocateJob,
    BadCommand,
    Command,
    ExecuteBehavior,
    Pause,
    ReleaseTeleop,
    Resume,
    SetAutonomy,
    Teleop,
    TimedCommand,
    command_from_json,
)
from .events import (
    CorruptLog,
    EventLog,
    LogError,
    LogHeader,
    LogWriteError,
    MissionEvent,
    read_log,
)
from .executor import (
    BehaviorOutcome,
    EdgeRun,
    ExecStatus,
    ExecutorConfig,
    execute_plan,
)
from .geometry import Pose2, Pose3, normalize_angle
from .graph import (
    BehaviorKind,
    DoorState,
    Edge,
    EdgeId,
    GraphSnapshot,
    Node,
    NodeId,
    NodeKind,
    ObjectId,
    ObjectLabel,
    Situation,
    SituationalGraph,
    WorldObject,
)
from .gridmap import CellState, GridMap
from .mission import Mission, MissionConfig, MissionSummary, run_mission
from .planning import (
    AutonomyLevel,
    Job,
    NoPath,
    Plan,
    PlannerState,
    RewardModel,
    UnknownNode,
    plan_path,
    planner_tick,
    reachable_costs,
    select_job,
)
from .recording import Recorder, RecorderConfig, observe
from .world import (
    ScenarioError,
    SensorConfig,
    VelocityCommand,
    WaypointCommand,
    WorldModel,
    load_scenario,
    load_scenario_file,
)

__version__ = "0.1.0"

__all__ = [
    "AllocateJob",
    "AutonomyLevel",
    "BadCommand",
    "BehaviorKind",
    "BehaviorOutcome",
    "CellState",
    "Command",
    "CorruptLog",
    "DoorState",
    "Edge",
    "EdgeId",
    "EdgeRun",
    "EventLog",
    "ExecStatus",
    "ExecuteBehavior",
    "ExecutorConfig",
    "GraphSnapshot",
    "GridMap",
    "Job",
    "LogError",
    "LogHeader",
    "LogWriteError",
    "Mission",
    "MissionConfig",
    "MissionEvent",
    "MissionSummary",
    "NoPath",
    "Node",
    "NodeId",
    "NodeKind",
    "ObjectId",
    "ObjectLabel",
    "Pause",
    "Plan",
    "PlannerState",
    "Pose2",
    "Pose3",
    "Recorder",
    "RecorderConfig",
    "ReleaseTeleop",
    "Resume",
    "RewardModel",
    "ScenarioError",
    "SensorConfig",
    "SetAutonomy",
    "Situation",
    "SituationalGraph",
    "Teleop",
    "TimedCommand",
    "UnknownNode",
    "VelocityCommand",
    "WaypointCommand",
    "WorldModel",
    "WorldObject",
    "command_from_json",
    "execute_plan",
    "load_scenario",
    "load_scenario_file",
    "normalize_angle",
    "observe",
    "plan_path",
    "planner_tick",
    "reachable_costs",
    "read_log",
    "run_mission",
    "select_job",
    "__version__",
]
