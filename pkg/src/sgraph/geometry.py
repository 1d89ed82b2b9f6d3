"""Planar and spatial pose types shared by the graph, world model, and planner."""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    wrapped = (theta + math.pi) % TWO_PI - math.pi
    if wrapped == -math.pi:
        return math.pi
    return wrapped


@dataclass(frozen=True)
class Pose2:
    """Pose in the ground plane: position in meters, heading in radians."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"position must be finite, got ({self.x!r}, {self.y!r})")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def distance_to(self, other: Pose2) -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def heading_to(self, other: Pose2) -> float:
        return math.atan2(other.y - self.y, other.x - self.x)

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "theta": self.theta}

    @classmethod
    def from_json(cls, data: dict) -> Pose2:
        return cls(data["x"], data["y"], data.get("theta", 0.0))


@dataclass(frozen=True)
class Pose3:
    """Full spatial pose used for world objects. Angles wrap like Pose2.theta."""

    x: float
    y: float
    z: float = 0.0
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for name in ("roll", "pitch", "yaw"):
            object.__setattr__(self, name, normalize_angle(getattr(self, name)))

    def xy_distance_to(self, other: Pose2 | Pose3) -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "z": self.z,
            "roll": self.roll,
            "pitch": self.pitch,
            "yaw": self.yaw,
        }

    @classmethod
    def from_json(cls, data: dict) -> Pose3:
        return cls(
            data["x"],
            data["y"],
            data.get("z", 0.0),
            data.get("roll", 0.0),
            data.get("pitch", 0.0),
            data.get("yaw", 0.0),
        )
