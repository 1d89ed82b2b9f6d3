"""Operator commands and their wire encoding.

One JSON object per command, tagged by "type". The same shapes travel over
the WebSocket, sit in mission command scripts, and land in the event log,
so encode/decode lives here and nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import EdgeId, NodeId
from .planning import AutonomyLevel


class BadCommand(Exception):
    """A frame that does not decode to a known operator command."""


@dataclass(frozen=True)
class SetAutonomy:
    level: AutonomyLevel

    def to_json(self) -> dict:
        return {"type": "set_autonomy", "level": int(self.level)}


@dataclass(frozen=True)
class AllocateJob:
    node: NodeId

    def to_json(self) -> dict:
        return {"type": "allocate_job", "node": self.node}


@dataclass(frozen=True)
class ExecuteBehavior:
    edge: EdgeId

    def to_json(self) -> dict:
        return {"type": "execute_behavior", "edge": self.edge}


@dataclass(frozen=True)
class Teleop:
    vx: float = 0.0
    vy: float = 0.0
    wz: float = 0.0

    def to_json(self) -> dict:
        return {"type": "teleop", "vx": self.vx, "vy": self.vy, "wz": self.wz}


@dataclass(frozen=True)
class ReleaseTeleop:
    def to_json(self) -> dict:
        return {"type": "release_teleop"}


@dataclass(frozen=True)
class Pause:
    def to_json(self) -> dict:
        return {"type": "pause"}


@dataclass(frozen=True)
class Resume:
    def to_json(self) -> dict:
        return {"type": "resume"}


Command = SetAutonomy | AllocateJob | ExecuteBehavior | Teleop | ReleaseTeleop | Pause | Resume


def command_from_json(data: dict) -> Command:
    if not isinstance(data, dict):
        raise BadCommand("command frame must be a JSON object")
    kind = data.get("type")
    try:
        if kind == "set_autonomy":
            return SetAutonomy(AutonomyLevel(int(data["level"])))
        if kind == "allocate_job":
            return AllocateJob(int(data["node"]))
        if kind == "execute_behavior":
            return ExecuteBehavior(int(data["edge"]))
        if kind == "teleop":
            return Teleop(float(data.get("vx", 0.0)), float(data.get("vy", 0.0)),
                          float(data.get("wz", 0.0)))
        if kind == "release_teleop":
            return ReleaseTeleop()
        if kind == "pause":
            return Pause()
        if kind == "resume":
            return Resume()
    except (KeyError, TypeError, ValueError) as exc:
        raise BadCommand(f"malformed {kind} command: {exc}") from exc
    raise BadCommand(f"unknown command type {kind!r}")


@dataclass(frozen=True)
class TimedCommand:
    """A command scheduled for a simulation step, the unit of command scripts."""

    step: int
    command: Command

    def to_json(self) -> dict:
        return {"step": self.step, "command": self.command.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> TimedCommand:
        try:
            step = int(data["step"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BadCommand(f"malformed timed command: {exc}") from exc
        return cls(step, command_from_json(data["command"]))
