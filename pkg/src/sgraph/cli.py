"""Command line front end: headless runs, the live server, log replay.

Exit codes: 0 when the mission completes, 2 when the step limit cuts it
short, 1 on any error (bad arguments included).
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .events import CorruptLog, LogError, read_log
from .executor import ExecutorConfig
from .mission import MissionConfig, run_mission
from .planning import AutonomyLevel, RewardModel
from .recording import RecorderConfig
from .service import STEP_PERIOD, create_app, create_replay_app
from .world import SensorConfig, WorldError

_OVERRIDE_SECTIONS = {
    "sensors": SensorConfig,
    "recorder": RecorderConfig,
    "executor": ExecutorConfig,
    "rewards": RewardModel,
}


def _load_overrides(path: Path) -> dict:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot read config file: {exc}")
    if not isinstance(data, dict):
        raise click.ClickException("config file must hold a JSON object")
    kwargs: dict = {}
    for key, value in data.items():
        if key in _OVERRIDE_SECTIONS:
            try:
                kwargs[key] = _OVERRIDE_SECTIONS[key](**value)
            except TypeError as exc:
                raise click.ClickException(f"bad {key} settings: {exc}")
        elif key == "hold_on_teleop_affordance":
            kwargs[key] = bool(value)
        elif key == "step_limit":
            kwargs[key] = int(value)
        else:
            raise click.ClickException(f"unknown config key {key!r}")
    return kwargs


def _build_config(scenario: str, autonomy: int, seed: int, log: str | None,
                  steps: int | None, config_file: str | None) -> MissionConfig:
    scenario_path = Path(scenario)
    if not scenario_path.is_file():
        raise click.ClickException(f"scenario file not found: {scenario_path}")
    if not 1 <= autonomy <= 4:
        raise click.ClickException("autonomy level must be between 1 and 4")
    kwargs = _load_overrides(Path(config_file)) if config_file else {}
    if steps is not None:
        kwargs["step_limit"] = steps
    try:
        return MissionConfig(scenario=scenario_path, seed=seed,
                             autonomy=AutonomyLevel(autonomy),
                             log_path=Path(log) if log else None, **kwargs)
    except ValueError as exc:
        raise click.ClickException(str(exc))


@click.group()
def main() -> None:
    """Situational-graph mission tools."""


@main.command()
@click.option("--scenario", required=True, help="Scenario file (.scn).")
@click.option("--autonomy", default=1, show_default=True, type=int,
              help="Initial autonomy level, 1 (full autonomy) to 4 (teleop).")
@click.option("--seed", default=0, show_default=True, type=int,
              help="World RNG seed.")
@click.option("--log", default=None, help="Event log output path (JSON Lines).")
@click.option("--steps", default=None, type=int,
              help="Step limit.  [default: 10000]")
@click.option("--config", "config_file", default=None,
              help="JSON file overriding sensor/recorder/executor/reward "
                   "settings.")
def run(scenario: str, autonomy: int, seed: int, log: str | None,
        steps: int | None, config_file: str | None) -> None:
    """Run a mission headlessly and print its summary as JSON."""
    config = _build_config(scenario, autonomy, seed, log, steps, config_file)
    try:
        summary = run_mission(config)
    except (WorldError, LogError) as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(summary.to_json()))
    if summary.outcome != "MissionComplete":
        sys.exit(2)


@main.command()
@click.option("--scenario", required=True, help="Scenario file (.scn).")
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--log", default=None, help="Event log output path.")
@click.option("--autonomy", default=1, show_default=True, type=int)
@click.option("--steps", default=None, type=int,
              help="Step limit.  [default: 10000]")
@click.option("--config", "config_file", default=None,
              help="JSON settings overrides, as for run.")
def serve(scenario: str, port: int, host: str, seed: int, log: str | None,
          autonomy: int, steps: int | None, config_file: str | None) -> None:
    """Serve a live mission over WebSocket and REST, paced at 10 steps/s."""
    config = _build_config(scenario, autonomy, seed, log, steps, config_file)
    import uvicorn
    try:
        app = create_app(config)
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except (WorldError, LogError, OSError) as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.option("--log", "log_file", required=True, help="Recorded event log.")
@click.option("--port", default=None, type=int,
              help="Serve the replay over the wire protocol instead of "
                   "printing it.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--speed", default=None, type=float,
              help="Pacing multiplier; 0 disables pacing.  "
                   "[default: 0 to stdout, 1 when serving]")
def replay(log_file: str, port: int | None, host: str,
           speed: float | None) -> None:
    """Re-emit a recorded log in order, to stdout or over WebSocket."""
    path = Path(log_file)
    if not path.is_file():
        raise click.ClickException(f"log file not found: {path}")
    if port is None:
        try:
            header, events = read_log(path)
        except LogError as exc:
            raise click.ClickException(str(exc))
        pace = speed or 0.0
        click.echo(json.dumps(header.to_json(), separators=(",", ":")))
        previous = events[0].step if events else 0
        for event in events:
            if pace > 0 and event.step > previous:
                time.sleep((event.step - previous) * STEP_PERIOD / pace)
            previous = event.step
            click.echo(json.dumps(event.to_json(), separators=(",", ":")))
        return
    import uvicorn
    try:
        app = create_replay_app(path, speed=1.0 if speed is None else speed)
    except LogError as exc:
        raise click.ClickException(str(exc))
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise click.ClickException(str(exc))
