"""Exit codes, summaries, and replay behavior of the command line."""

import json

import uvicorn
from click.testing import CliRunner

from sgraph.cli import main
from sgraph.events import read_log

from worlds import OPEN_ROOM, write_scenario


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_run_prints_summary_and_exits_zero_on_completion(tmp_path):
    scenario = write_scenario(tmp_path, OPEN_ROOM)
    log = tmp_path / "out.jsonl"
    result = invoke("run", "--scenario", scenario, "--log", log, "--seed", 7)
    assert result.exit_code == 0, result.output
    summary = json.loads(result.output.strip().splitlines()[-1])
    assert summary["outcome"] == "MissionComplete"
    assert summary["frontiers_remaining"] == 0
    header, events = read_log(log)
    assert header.scenario_name == "open-room"
    assert header.seed == 7
    assert events


def short_sensors(tmp_path):
    """Settings that keep the room from being fully seen in one sweep."""
    settings = tmp_path / "settings.json"
    settings.write_text(json.dumps(
        {"sensors": {"lidar_rays": 120, "lidar_range": 2.5}}))
    return settings


def test_run_exits_two_when_step_limited(tmp_path):
    scenario = write_scenario(tmp_path, OPEN_ROOM)
    result = invoke("run", "--scenario", scenario, "--steps", 1,
                    "--config", short_sensors(tmp_path))
    assert result.exit_code == 2
    summary = json.loads(result.output.strip().splitlines()[-1])
    assert summary["outcome"] == "StepLimit"
    assert summary["steps"] == 1


def test_run_errors_exit_one(tmp_path):
    result = invoke("run", "--scenario", tmp_path / "missing.scn")
    assert result.exit_code == 1
    assert "not found" in result.output

    scenario = write_scenario(tmp_path, OPEN_ROOM)
    result = invoke("run", "--scenario", scenario, "--autonomy", 9)
    assert result.exit_code == 1
    assert "between 1 and 4" in result.output


def test_run_config_file_overrides(tmp_path):
    scenario = write_scenario(tmp_path, OPEN_ROOM)
    settings = tmp_path / "settings.json"

    settings.write_text(json.dumps(
        {"sensors": {"lidar_rays": 120, "lidar_range": 2.5},
         "rewards": {"frontier_reward": 80.0}, "step_limit": 5}))
    result = invoke("run", "--scenario", scenario, "--config", settings)
    assert result.exit_code == 2
    assert json.loads(result.output.strip().splitlines()[-1])["steps"] == 5

    settings.write_text(json.dumps({"quux": 1}))
    result = invoke("run", "--scenario", scenario, "--config", settings)
    assert result.exit_code == 1
    assert "unknown config key" in result.output

    settings.write_text(json.dumps({"sensors": {"laser": 1}}))
    result = invoke("run", "--scenario", scenario, "--config", settings)
    assert result.exit_code == 1
    assert "bad sensors settings" in result.output


def test_replay_stdout_reprints_the_log_verbatim(tmp_path):
    scenario = write_scenario(tmp_path, OPEN_ROOM)
    log = tmp_path / "out.jsonl"
    assert invoke("run", "--scenario", scenario, "--log", log).exit_code == 0
    result = invoke("replay", "--log", log)
    assert result.exit_code == 0
    assert result.output.splitlines() == log.read_text().splitlines()


def test_replay_corrupt_log_exits_one(tmp_path):
    scenario = write_scenario(tmp_path, OPEN_ROOM)
    log = tmp_path / "out.jsonl"
    assert invoke("run", "--scenario", scenario, "--log", log).exit_code == 0
    lines = log.read_text().splitlines()
    log.write_text("\n".join(lines[:-1] + [lines[-1][: len(lines[-1]) // 2]])
                   + "\n")
    result = invoke("replay", "--log", log)
    assert result.exit_code == 1
    assert "line" in result.output


def test_serve_hands_the_app_to_uvicorn(tmp_path, monkeypatch):
    captured = {}

    def fake_run(app, **kwargs):
        captured["app"] = app
        captured.update(kwargs)

    monkeypatch.setattr(uvicorn, "run", fake_run)
    scenario = write_scenario(tmp_path, OPEN_ROOM)
    result = invoke("serve", "--scenario", scenario, "--port", 9321)
    assert result.exit_code == 0, result.output
    assert captured["port"] == 9321
    assert captured["app"].title == "situational-graph mission server"

    log = tmp_path / "replayed.jsonl"
    assert invoke("run", "--scenario", scenario, "--log", log).exit_code == 0
    result = invoke("replay", "--log", log, "--port", 9321)
    assert result.exit_code == 0, result.output
    assert captured["app"].title == "situational-graph replay server"
