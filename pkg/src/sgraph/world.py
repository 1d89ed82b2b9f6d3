"""Simulated 2D indoor world: grid terrain, doors, objects, and a disk robot.

Collision is resolved against cell centers: the robot's disk is considered
to intersect a cell when that cell's center lies inside the disk. This keeps
motion, lidar, and corridor checks mutually consistent at grid scale and
matches a one-cell doorway being passable exactly when the door is open.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from .geometry import Pose2, Pose3, normalize_angle
from .gridmap import CellState, GridMap
from .graph import DoorState, ObjectId, ObjectLabel, WorldObject

FIXED_DT = 0.1


class Terrain(IntEnum):
    FLOOR = 0
    WALL = 1


class WorldError(Exception):
    pass


class ScenarioError(WorldError):
    pass


class ParseError(ScenarioError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class NoStartCell(ScenarioError):
    pass


class MultipleStartCells(ScenarioError):
    pass


class ObjectOnWall(ScenarioError):
    pass


class UnknownObject(WorldError):
    pass


class NotADoor(WorldError):
    pass


@dataclass
class RobotState:
    pose: Pose2
    radius: float = 0.3
    max_speed: float = 1.0
    max_yaw_rate: float = 1.5


@dataclass
class SensorConfig:
    lidar_rays: int = 72
    lidar_range: float = 5.0
    detector_range: float = 3.0
    detector_fov: float = 2.0 * math.pi
    noise_sigma: float = 0.0  # reserved gaussian hook, off by default


@dataclass(frozen=True)
class VelocityCommand:
    vx: float = 0.0
    vy: float = 0.0
    wz: float = 0.0


STOP = VelocityCommand()


@dataclass(frozen=True)
class WaypointCommand:
    target: Pose2


@dataclass(frozen=True)
class Hit:
    distance: float
    cell: tuple[int, int]


@dataclass
class PerceptionEvent:
    step: int


@dataclass
class PoseUpdate(PerceptionEvent):
    pose: Pose2

    def to_json(self) -> dict:
        return {"event": "pose_update", "pose": self.pose.to_json()}


@dataclass
class LocalGrid(PerceptionEvent):
    gridmap: GridMap

    def to_json(self) -> dict:
        return {"event": "local_grid", "gridmap": self.gridmap.to_json()}


@dataclass
class ObjectDetected(PerceptionEvent):
    object: WorldObject

    def to_json(self) -> dict:
        return {"event": "object_detected", "object": self.object.to_json()}


@dataclass
class DoorStateChanged(PerceptionEvent):
    object_id: ObjectId
    state: DoorState

    def to_json(self) -> dict:
        return {"event": "door_state_changed", "object": self.object_id, "state": self.state.value}


@dataclass
class Door:
    id: ObjectId
    cell: tuple[int, int]
    state: DoorState


_GRID_CHARS = {"#", ".", "S", "D", "d", "C", "P"}
_DIRECTIVE_LABELS = {"container": ObjectLabel.CONTAINER, "person": ObjectLabel.PERSON, "door": ObjectLabel.DOOR}


class WorldModel:
    """Ground-truth world state advanced in fixed 0.1 s steps."""

    def __init__(self, name: str, resolution: float, terrain: np.ndarray,
                 doors: dict[ObjectId, Door], objects: dict[ObjectId, tuple[ObjectLabel, Pose3]],
                 robot: RobotState, rng_seed: int = 0):
        self.name = name
        self.resolution = resolution
        self.terrain = terrain  # (height, width) of Terrain values
        self.doors = doors
        self.objects = objects
        self.robot = robot
        self.rng_seed = rng_seed
        self.rng = random.Random(rng_seed)
        self.step_index = 0
        self.height, self.width = terrain.shape
        self._blocked = np.zeros_like(terrain, dtype=bool)
        self._rebuild_blocked()

    def _rebuild_blocked(self) -> None:
        self._blocked[:, :] = self.terrain == Terrain.WALL
        for door in self.doors.values():
            ix, iy = door.cell
            self._blocked[iy, ix] = door.state is DoorState.CLOSED

    # -- geometry helpers ---------------------------------------------------

    def in_bounds(self, ix: int, iy: int) -> bool:
        return 0 <= ix < self.width and 0 <= iy < self.height

    def blocked_cell(self, ix: int, iy: int) -> bool:
        """WALL or CLOSED-door cell; out-of-bounds counts as blocked."""
        if not self.in_bounds(ix, iy):
            return True
        return bool(self._blocked[iy, ix])

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        return int(math.floor(x / self.resolution)), int(math.floor(y / self.resolution))

    def cell_center(self, ix: int, iy: int) -> tuple[float, float]:
        return (ix + 0.5) * self.resolution, (iy + 0.5) * self.resolution

    def disk_blocked(self, x: float, y: float, radius: float) -> bool:
        """True when any blocked cell center lies strictly inside the disk."""
        res = self.resolution
        lo_x = int(math.floor((x - radius) / res))
        hi_x = int(math.floor((x + radius) / res))
        lo_y = int(math.floor((y - radius) / res))
        hi_y = int(math.floor((y + radius) / res))
        r2 = radius * radius
        for iy in range(lo_y, hi_y + 1):
            cy = (iy + 0.5) * res
            for ix in range(lo_x, hi_x + 1):
                cx = (ix + 0.5) * res
                if (cx - x) ** 2 + (cy - y) ** 2 < r2 and self.blocked_cell(ix, iy):
                    return True
        return False

    # -- simulation ---------------------------------------------------------

    def step(self, command: VelocityCommand | WaypointCommand, dt: float = FIXED_DT) -> RobotState:
        """Advance one step; motion into blocked cells stops at contact."""
        pose = self.robot.pose
        if isinstance(command, WaypointCommand):
            dist = pose.distance_to(command.target)
            if dist > 1e-12:
                heading = pose.heading_to(command.target)
                step_len = min(self.robot.max_speed * dt, dist)
                dx, dy = math.cos(heading) * step_len, math.sin(heading) * step_len
                new_theta = heading
            else:
                dx = dy = 0.0
                new_theta = pose.theta
        else:
            vx, vy, wz = command.vx, command.vy, command.wz
            speed = math.hypot(vx, vy)
            if speed > self.robot.max_speed:
                scale = self.robot.max_speed / speed
                vx, vy = vx * scale, vy * scale
            wz = max(-self.robot.max_yaw_rate, min(self.robot.max_yaw_rate, wz))
            cos_t, sin_t = math.cos(pose.theta), math.sin(pose.theta)
            dx = (vx * cos_t - vy * sin_t) * dt
            dy = (vx * sin_t + vy * cos_t) * dt
            new_theta = normalize_angle(pose.theta + wz * dt)

        nx, ny = self._try_move(pose.x, pose.y, dx, dy)
        self.robot.pose = Pose2(nx, ny, new_theta)
        self.step_index += 1
        return replace(self.robot)

    def _try_move(self, x: float, y: float, dx: float, dy: float) -> tuple[float, float]:
        if dx == 0.0 and dy == 0.0:
            return x, y
        radius = self.robot.radius
        # Largest collision-free prefix of the displacement, 1/16 granularity.
        for k in range(16, 0, -1):
            f = k / 16.0
            cx, cy = x + dx * f, y + dy * f
            if not self.disk_blocked(cx, cy, radius):
                return cx, cy
        return x, y

    def set_door(self, object_id: ObjectId, state: DoorState) -> DoorStateChanged:
        """Toggle a door. Idempotent calls still emit the event."""
        if object_id not in self.objects:
            raise UnknownObject(f"no object {object_id!r}")
        door = self.doors.get(object_id)
        if door is None:
            raise NotADoor(f"object {object_id!r} is not a door")
        door.state = state
        ix, iy = door.cell
        self._blocked[iy, ix] = self.terrain[iy, ix] == Terrain.WALL or state is DoorState.CLOSED
        return DoorStateChanged(self.step_index, object_id, state)

    def raycast(self, x: float, y: float, angle: float, max_range: float) -> Hit | None:
        """DDA grid traversal to the first WALL or CLOSED-door cell."""
        res = self.resolution
        ix, iy = self.cell_of(x, y)
        if self.in_bounds(ix, iy) and self._blocked[iy, ix]:
            return Hit(0.0, (ix, iy))
        dx, dy = math.cos(angle), math.sin(angle)
        if dx > 0:
            step_x, t_max_x, t_delta_x = 1, ((ix + 1) * res - x) / dx, res / dx
        elif dx < 0:
            step_x, t_max_x, t_delta_x = -1, (ix * res - x) / dx, -res / dx
        else:
            step_x, t_max_x, t_delta_x = 0, math.inf, math.inf
        if dy > 0:
            step_y, t_max_y, t_delta_y = 1, ((iy + 1) * res - y) / dy, res / dy
        elif dy < 0:
            step_y, t_max_y, t_delta_y = -1, (iy * res - y) / dy, -res / dy
        else:
            step_y, t_max_y, t_delta_y = 0, math.inf, math.inf

        while True:
            if t_max_x <= t_max_y:
                t = t_max_x
                ix += step_x
                t_max_x += t_delta_x
            else:
                t = t_max_y
                iy += step_y
                t_max_y += t_delta_y
            if t >= max_range:
                return None
            if not self.in_bounds(ix, iy):
                return None
            if self._blocked[iy, ix]:
                return Hit(t, (ix, iy))

    def line_of_sight(self, x: float, y: float, tx: float, ty: float) -> bool:
        """Unobstructed view from (x, y) to (tx, ty); the target cell itself
        does not occlude (a closed door stays visible from either side)."""
        dist = math.hypot(tx - x, ty - y)
        if dist < 1e-12:
            return True
        hit = self.raycast(x, y, math.atan2(ty - y, tx - x), dist)
        return hit is None or hit.cell == self.cell_of(tx, ty)

    def sense(self, config: SensorConfig) -> list[PerceptionEvent]:
        """One perception cycle: pose, lidar local grid, object detections."""
        step = self.step_index
        pose = self.robot.pose
        if config.noise_sigma > 0:
            noisy = Pose2(pose.x + self.rng.gauss(0.0, config.noise_sigma),
                          pose.y + self.rng.gauss(0.0, config.noise_sigma), pose.theta)
            events: list[PerceptionEvent] = [PoseUpdate(step, noisy)]
        else:
            events = [PoseUpdate(step, pose)]

        events.append(LocalGrid(step, self._sweep_lidar(config)))

        for oid in sorted(self.objects):
            label, opose = self.objects[oid]
            d = math.hypot(opose.x - pose.x, opose.y - pose.y)
            if d > config.detector_range:
                continue
            if config.detector_fov < 2.0 * math.pi - 1e-9 and d > 1e-12:
                bearing = math.atan2(opose.y - pose.y, opose.x - pose.x)
                if abs(normalize_angle(bearing - pose.theta)) > config.detector_fov / 2.0:
                    continue
            if not self.line_of_sight(pose.x, pose.y, opose.x, opose.y):
                continue
            state = self.doors[oid].state if oid in self.doors else None
            events.append(ObjectDetected(step, WorldObject(oid, label, opose, state)))
        return events

    def _sweep_lidar(self, config: SensorConfig) -> GridMap:
        """Cast all lidar rays at once (vectorized DDA) into a local grid
        aligned with the world lattice and centered on the robot's cell."""
        res = self.resolution
        pose = self.robot.pose
        half = int(math.ceil(config.lidar_range / res))
        size = 2 * half + 1
        local = np.full((size, size), CellState.UNKNOWN, dtype=np.uint8)
        cx, cy = self.cell_of(pose.x, pose.y)

        if self.in_bounds(cx, cy):
            local[half, half] = CellState.OCCUPIED if self._blocked[cy, cx] else CellState.FREE

        n = config.lidar_rays
        angles = pose.theta + np.arange(n) * (2.0 * math.pi / n)
        dx = np.cos(angles)
        dy = np.sin(angles)
        step_x = np.where(dx > 0, 1, np.where(dx < 0, -1, 0))
        step_y = np.where(dy > 0, 1, np.where(dy < 0, -1, 0))
        with np.errstate(divide="ignore"):
            inv_dx = np.where(dx != 0, 1.0 / dx, np.inf)
            inv_dy = np.where(dy != 0, 1.0 / dy, np.inf)
        t_delta_x = np.abs(res * inv_dx)
        t_delta_y = np.abs(res * inv_dy)
        t_max_x = np.where(
            dx > 0, ((cx + 1) * res - pose.x) * inv_dx,
            np.where(dx < 0, (cx * res - pose.x) * inv_dx, np.inf))
        t_max_y = np.where(
            dy > 0, ((cy + 1) * res - pose.y) * inv_dy,
            np.where(dy < 0, (cy * res - pose.y) * inv_dy, np.inf))

        ix = np.full(n, cx)
        iy = np.full(n, cy)
        alive = np.ones(n, dtype=bool)
        blocked = self._blocked
        while alive.any():
            take_x = t_max_x <= t_max_y
            t = np.where(take_x, t_max_x, t_max_y)
            ix = ix + np.where(take_x, step_x, 0)
            iy = iy + np.where(take_x, 0, step_y)
            t_max_x = t_max_x + np.where(take_x, t_delta_x, 0.0)
            t_max_y = t_max_y + np.where(take_x, 0.0, t_delta_y)
            alive &= t < config.lidar_range
            alive &= (ix >= 0) & (ix < self.width) & (iy >= 0) & (iy < self.height)
            if not alive.any():
                break
            sel = np.flatnonzero(alive)
            hit = blocked[iy[sel], ix[sel]]
            lx = ix[sel] - (cx - half)
            ly = iy[sel] - (cy - half)
            local[ly[~hit], lx[~hit]] = CellState.FREE
            local[ly[hit], lx[hit]] = CellState.OCCUPIED
            alive[sel[hit]] = False

        origin = Pose2((cx - half) * res, (cy - half) * res)
        return GridMap(size, size, res, origin, local)

    def reachable_floor(self) -> np.ndarray:
        """Boolean mask of FLOOR cells 4-connected to the robot's start cell.
        Door cells are floor terrain, so both door states are traversable here."""
        mask = np.zeros_like(self.terrain, dtype=bool)
        start = self.cell_of(self.robot.pose.x, self.robot.pose.y)
        if not self.in_bounds(*start) or self.terrain[start[1], start[0]] == Terrain.WALL:
            return mask
        stack = [start]
        mask[start[1], start[0]] = True
        while stack:
            ix, iy = stack.pop()
            for jx, jy in ((ix + 1, iy), (ix - 1, iy), (ix, iy + 1), (ix, iy - 1)):
                if self.in_bounds(jx, jy) and not mask[jy, jx] \
                        and self.terrain[jy, jx] == Terrain.FLOOR:
                    mask[jy, jx] = True
                    stack.append((jx, jy))
        return mask


def load_scenario(text: str, *, rng_seed: int = 0, robot_radius: float = 0.3,
                  max_speed: float = 1.0, max_yaw_rate: float = 1.5) -> WorldModel:
    """Parse the ASCII scenario format.

    Header lines (``resolution: 0.5``, ``name: ...``, optional object
    directives ``container|person|door: COL ROW [open|closed]`` in text grid
    indices), a blank line, then the grid: ``#`` wall, ``.`` floor, ``S``
    start, ``D``/``d`` closed/open door, ``C`` container, ``P`` person.
    Grid rows run top to bottom, i.e. decreasing y.
    """
    resolution: float | None = None
    name = "scenario"
    directives: list[tuple[int, str, int, int, DoorState | None]] = []
    lines = text.splitlines()

    idx = 0
    while idx < len(lines):
        line = lines[idx]
        if not line.strip():
            idx += 1
            break
        if ":" not in line:
            raise ParseError(idx + 1, f"expected 'key: value' header, got {line!r}")
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()
        if key == "resolution":
            try:
                resolution = float(value)
            except ValueError:
                raise ParseError(idx + 1, f"bad resolution {value!r}") from None
            if not math.isfinite(resolution) or resolution <= 0:
                raise ParseError(idx + 1, f"resolution must be positive, got {value!r}")
        elif key == "name":
            name = value
        elif key in _DIRECTIVE_LABELS:
            parts = value.split()
            if len(parts) not in (2, 3):
                raise ParseError(idx + 1, f"expected '{key}: COL ROW [open|closed]'")
            try:
                col, row = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(idx + 1, f"bad cell index in {value!r}") from None
            state: DoorState | None = None
            if key == "door":
                state = DoorState.CLOSED
                if len(parts) == 3:
                    if parts[2] not in ("open", "closed"):
                        raise ParseError(idx + 1, f"bad door state {parts[2]!r}")
                    state = DoorState(parts[2])
            elif len(parts) == 3:
                raise ParseError(idx + 1, f"{key} takes no state")
            directives.append((idx + 1, key, col, row, state))
        else:
            raise ParseError(idx + 1, f"unknown header key {key!r}")
        idx += 1

    if resolution is None:
        raise ParseError(1, "missing 'resolution:' header")

    grid_rows: list[str] = []
    first_grid_line = idx + 1
    for off, line in enumerate(lines[idx:]):
        if not line.strip():
            continue
        for col, ch in enumerate(line.rstrip()):
            if ch not in _GRID_CHARS and ch != " ":
                raise ParseError(idx + off + 1, f"unknown grid character {ch!r} at column {col}")
        grid_rows.append(line.rstrip())
    if not grid_rows:
        raise ParseError(first_grid_line, "scenario has no grid")

    height = len(grid_rows)
    width = max(len(r) for r in grid_rows)
    terrain = np.full((height, width), Terrain.WALL, dtype=np.uint8)
    doors: dict[ObjectId, Door] = {}
    objects: dict[ObjectId, tuple[ObjectLabel, Pose3]] = {}
    start: tuple[int, int] | None = None
    next_oid = 1

    def center(ix: int, iy: int) -> Pose3:
        return Pose3((ix + 0.5) * resolution, (iy + 0.5) * resolution)

    for row_i, row in enumerate(grid_rows):
        iy = height - 1 - row_i
        for col_i, ch in enumerate(row):
            ix = col_i
            if ch in ("#", " "):
                continue  # padded/short cells stay wall
            terrain[iy, ix] = Terrain.FLOOR
            if ch == "S":
                if start is not None:
                    raise MultipleStartCells(f"second start cell at row {row_i}, col {col_i}")
                start = (ix, iy)
            elif ch in ("D", "d"):
                oid = f"o{next_oid}"
                next_oid += 1
                state = DoorState.CLOSED if ch == "D" else DoorState.OPEN
                doors[oid] = Door(oid, (ix, iy), state)
                objects[oid] = (ObjectLabel.DOOR, center(ix, iy))
            elif ch == "C":
                oid = f"o{next_oid}"
                next_oid += 1
                objects[oid] = (ObjectLabel.CONTAINER, center(ix, iy))
            elif ch == "P":
                oid = f"o{next_oid}"
                next_oid += 1
                objects[oid] = (ObjectLabel.PERSON, center(ix, iy))

    for line_no, key, col, row, state in directives:
        if not (0 <= row < height and 0 <= col < width):
            raise ParseError(line_no, f"cell ({col}, {row}) outside the grid")
        ix, iy = col, height - 1 - row
        if terrain[iy, ix] == Terrain.WALL:
            raise ObjectOnWall(f"{key} directive at line {line_no} targets a wall cell ({col}, {row})")
        oid = f"o{next_oid}"
        next_oid += 1
        if key == "door":
            doors[oid] = Door(oid, (ix, iy), state or DoorState.CLOSED)
            objects[oid] = (ObjectLabel.DOOR, center(ix, iy))
        else:
            objects[oid] = (_DIRECTIVE_LABELS[key], center(ix, iy))

    if start is None:
        raise NoStartCell("scenario needs exactly one 'S' cell")

    sx, sy = (start[0] + 0.5) * resolution, (start[1] + 0.5) * resolution
    robot = RobotState(Pose2(sx, sy, 0.0), radius=robot_radius,
                       max_speed=max_speed, max_yaw_rate=max_yaw_rate)
    return WorldModel(name, resolution, terrain, doors, objects, robot, rng_seed=rng_seed)


def load_scenario_file(path: str, **kwargs) -> WorldModel:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read(), **kwargs)
