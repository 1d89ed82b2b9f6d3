"""WebSocket and REST front end over a live or replayed mission.

One FastAPI app owns one mission loop. Network handlers never touch the
world or graph directly: commands go in through the mission queue, state
comes out through the event broadcast, and REST reads are point-in-time
snapshots taken between simulation steps.

Wire protocol, one JSON text frame per message. Server to client:
snapshot, graph_delta, robot_state, event, plan, error; every frame
carries a per-connection "seq" and the simulation "step". Client to
server: the operator command encoding from commands.py.
"""

from __future__ import annotations

import asyncio
import json
from collections import deque
from contextlib import asynccontextmanager, suppress
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel, ConfigDict

from .commands import BadCommand, Command, command_from_json
from .events import LogHeader, MissionEvent, read_log
from .graph import NodeKind
from .mission import Mission, MissionConfig

STEP_PERIOD = 0.1  # simulated seconds per step; serve mode paces to this


def _canon(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _frame_for(event: MissionEvent) -> tuple[str, dict]:
    """Map a mission event to its wire frame type and body."""
    if event.kind == "graph_delta":
        return "graph_delta", {"delta": event.payload}
    if event.kind == "plan":
        return "plan", dict(event.payload)
    return "event", {"kind": event.kind, "payload": event.payload,
                     "event_seq": event.seq}


class _Client:
    """One websocket subscriber; its frames are numbered per connection."""

    def __init__(self) -> None:
        self.queue: asyncio.Queue[dict] = asyncio.Queue()
        self.seq = 0

    def push(self, frame_type: str, step: int, body: dict) -> None:
        self.seq += 1
        self.queue.put_nowait(
            {"type": frame_type, "seq": self.seq, "step": step, **body})


class MissionHub:
    """Runs the mission loop and fans its events out to subscribers."""

    def __init__(self, mission: Mission, pace_hz: float = 10.0):
        self.mission = mission
        self.pace_hz = pace_hz
        self.clients: set[_Client] = set()
        self.outcome: str | None = None
        self._cycle_events: list[MissionEvent] = []
        # submitted-command bookkeeping so a rejection can be answered with
        # an error frame to the client that caused it
        self._pending: deque[tuple[str, _Client]] = deque()
        self._awaiting: deque[tuple[str, _Client]] = deque()
        mission.listeners.append(self._cycle_events.append)

    @property
    def step_index(self) -> int:
        return self.mission.world.step_index

    # -- subscriptions ------------------------------------------------------

    def attach(self) -> _Client:
        client = _Client()
        client.push("snapshot", self.step_index, self.snapshot_body())
        self.clients.add(client)
        return client

    def detach(self, client: _Client) -> None:
        self.clients.discard(client)
        self._pending = deque(
            (c, s) for c, s in self._pending if s is not client)
        self._awaiting = deque(
            (c, s) for c, s in self._awaiting if s is not client)

    def snapshot_body(self) -> dict:
        mission = self.mission
        return {"graph": mission.graph.snapshot().to_json(include_gridmaps=True),
                "robot": {"pose": mission.world.robot.pose.to_json()},
                "level": int(mission.state.level),
                "paused": mission.paused,
                "complete": mission.complete}

    # -- inbound ------------------------------------------------------------

    def handle_text(self, client: _Client, text: str) -> None:
        try:
            data = json.loads(text)
        except ValueError:
            client.push("error", self.step_index, {"reason": "frame is not JSON"})
            return
        try:
            command = command_from_json(data)
        except BadCommand as exc:
            client.push("error", self.step_index, {"reason": str(exc)})
            return
        self._pending.append((_canon(command.to_json()), client))
        self.mission.submit(command)

    def submit(self, command: Command) -> None:
        """REST path: queue a command with no error-frame recipient."""
        self.mission.submit(command)

    # -- outbound -----------------------------------------------------------

    def after_step(self) -> None:
        # the mission listener holds a reference to _cycle_events, so the
        # list must be cleared in place, never rebound
        events = list(self._cycle_events)
        self._cycle_events.clear()
        for event in events:
            self._route_rejection(event)
            frame_type, body = _frame_for(event)
            for client in tuple(self.clients):
                client.push(frame_type, event.step, body)
        body = {"pose": self.mission.world.robot.pose.to_json(),
                "level": int(self.mission.state.level),
                "paused": self.mission.paused}
        for client in tuple(self.clients):
            client.push("robot_state", self.step_index, body)

    def _route_rejection(self, event: MissionEvent) -> None:
        if event.kind == "command":
            canon = _canon(event.payload["command"])
            if self._pending and self._pending[0][0] == canon:
                entry = self._pending.popleft()
                if not event.payload["accepted"]:
                    self._awaiting.append(entry)
        elif (event.kind == "notification"
                and event.payload.get("kind") == "rejected"):
            canon = _canon(event.payload["command"])
            if self._awaiting and self._awaiting[0][0] == canon:
                _, client = self._awaiting.popleft()
                client.push("error", event.step,
                            {"reason": event.payload["reason"]})

    # -- the loop -----------------------------------------------------------

    async def run(self, step_limit: int) -> None:
        loop = asyncio.get_running_loop()
        period = 1.0 / self.pace_hz if self.pace_hz > 0 else 0.0
        next_due = loop.time()
        try:
            while self.step_index < step_limit:
                alive = self.mission.step()
                self.after_step()
                if not alive:
                    self.outcome = "MissionComplete"
                    return
                if period:
                    next_due += period
                    await asyncio.sleep(max(0.0, next_due - loop.time()))
                else:
                    await asyncio.sleep(0)
            self.outcome = "StepLimit"
        finally:
            self.mission.close()


# -- REST models ---------------------------------------------------------------

class PoseOut(BaseModel):
    x: float
    y: float
    theta: float


class HealthOut(BaseModel):
    status: str
    scenario: str
    step: int
    complete: bool


class StateOut(BaseModel):
    step: int
    level: int
    paused: bool
    complete: bool
    outcome: str | None
    pose: PoseOut
    revision: int
    node_count: int
    edge_count: int
    frontier_count: int
    current: int | None


class CommandIn(BaseModel):
    model_config = ConfigDict(extra="allow")

    type: str


class CommandAck(BaseModel):
    queued: bool


# -- live mission app -----------------------------------------------------------

def _default_ui_dir() -> Path | None:
    """The built operator UI, when the checkout has one."""
    dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return dist if (dist / "index.html").is_file() else None


def _mount_ui(app: FastAPI, ui_dir: Path | None) -> None:
    # mounted last so /ws and the /api routes keep winning
    if ui_dir is None:
        ui_dir = _default_ui_dir()
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")


def create_app(config: MissionConfig, *, pace_hz: float = 10.0,
               ui_dir: Path | None = None) -> FastAPI:
    """A server running one mission; pace_hz 0 steps as fast as possible."""
    mission = Mission(config)
    hub = MissionHub(mission, pace_hz)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(hub.run(config.step_limit))
        try:
            yield
        finally:
            task.cancel()
            with suppress(asyncio.CancelledError):
                await task

    app = FastAPI(title="situational-graph mission server", lifespan=lifespan)
    app.state.hub = hub

    @app.get("/health", response_model=HealthOut)
    async def health() -> HealthOut:
        return HealthOut(status="ok", scenario=mission.world.name,
                         step=hub.step_index, complete=mission.complete)

    @app.get("/api/state", response_model=StateOut)
    async def state() -> StateOut:
        graph = mission.graph
        frontiers = sum(1 for n in graph.nodes.values()
                        if n.kind is NodeKind.FRONTIER)
        return StateOut(
            step=hub.step_index, level=int(mission.state.level),
            paused=mission.paused, complete=mission.complete,
            outcome=hub.outcome,
            pose=PoseOut(**mission.world.robot.pose.to_json()),
            revision=graph.revision, node_count=len(graph.nodes),
            edge_count=len(graph.edges), frontier_count=frontiers,
            current=mission.state.current)

    @app.get("/api/graph")
    async def graph_json(gridmaps: bool = False) -> dict:
        return mission.graph.snapshot().to_json(include_gridmaps=gridmaps)

    @app.get("/api/nodes/{node_id}/gridmap")
    async def node_gridmap(node_id: int) -> dict:
        node = mission.graph.nodes.get(node_id)
        if node is None:
            raise HTTPException(404, f"unknown node {node_id}")
        return node.situation.gridmap.to_json()

    @app.post("/api/commands", response_model=CommandAck, status_code=202)
    async def post_command(body: CommandIn) -> CommandAck:
        try:
            command = command_from_json(body.model_dump())
        except BadCommand as exc:
            raise HTTPException(400, str(exc)) from exc
        hub.submit(command)
        return CommandAck(queued=True)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        client = hub.attach()

        async def pump() -> None:
            while True:
                await ws.send_json(await client.queue.get())

        sender = asyncio.create_task(pump())
        try:
            while True:
                hub.handle_text(client, await ws.receive_text())
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            with suppress(asyncio.CancelledError):
                await sender
            hub.detach(client)

    _mount_ui(app, ui_dir)
    return app


# -- replay app -----------------------------------------------------------------

def _replay_snapshot(header: LogHeader) -> dict:
    return {"graph": {"revision": 0, "nodes": [], "edges": []},
            "robot": {"pose": None}, "level": 1, "paused": False,
            "complete": False,
            "replay": {"scenario": header.scenario_name, "seed": header.seed}}


def create_replay_app(log_path: str | Path, *, speed: float = 1.0,
                      ui_dir: Path | None = None) -> FastAPI:
    """Serve a recorded log over the wire protocol; no simulation runs.

    Each connection gets the whole stream from the top, paced by the
    original step timestamps divided by speed (0 streams unpaced).
    """
    header, events = read_log(Path(log_path))
    app = FastAPI(title="situational-graph replay server")

    @app.get("/health", response_model=HealthOut)
    async def health() -> HealthOut:
        return HealthOut(status="replay", scenario=header.scenario_name,
                         step=events[-1].step if events else 0, complete=True)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        seq = 0
        step = 0

        async def send(frame_type: str, body: dict) -> None:
            nonlocal seq
            seq += 1
            await ws.send_json(
                {"type": frame_type, "seq": seq, "step": step, **body})

        with suppress(WebSocketDisconnect):
            await send("snapshot", _replay_snapshot(header))
            level = 1
            paused = False
            for event in events:
                if speed > 0 and event.step > step:
                    await asyncio.sleep((event.step - step) * STEP_PERIOD / speed)
                step = event.step
                if event.kind == "autonomy_changed":
                    level = int(event.payload["level"])
                elif event.kind == "command" and event.payload["accepted"]:
                    kind = event.payload["command"]["type"]
                    if kind in ("pause", "resume"):
                        paused = kind == "pause"
                frame_type, body = _frame_for(event)
                await send(frame_type, body)
                if (event.kind == "perception"
                        and event.payload.get("event") == "pose_update"):
                    await send("robot_state", {"pose": event.payload["pose"],
                                               "level": level, "paused": paused})
            while True:
                await ws.receive_text()
                await send("error", {"reason": "replay session is read-only"})

    _mount_ui(app, ui_dir)
    return app
