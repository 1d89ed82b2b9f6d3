#!/usr/bin/env python3
"""Regenerate the operator-ui golden fixture.

Runs the bundled lab scenario headlessly, converts its event log to the
exact frame stream the replay server would emit, and writes both the
frames and the independently derived expected values into
frontend/tests/. Run from the repository root:

    python3 scripts/make_golden.py
"""

import json
import tempfile
from pathlib import Path

from sgraph.audit import replay_state
from sgraph.events import read_log
from sgraph.mission import MissionConfig, run_mission
from sgraph.service import _frame_for, _replay_snapshot

ROOT = Path(__file__).resolve().parents[1]
OUT_DIR = ROOT / "frontend" / "tests"


def frames_from_log(log_path: Path) -> list[dict]:
    header, events = read_log(log_path)
    frames: list[dict] = []
    seq = 0
    step = 0

    def emit(frame_type: str, body: dict) -> None:
        nonlocal seq
        seq += 1
        frames.append({"type": frame_type, "seq": seq, "step": step, **body})

    emit("snapshot", _replay_snapshot(header))
    level = 1
    paused = False
    for event in events:
        step = event.step
        if event.kind == "autonomy_changed":
            level = int(event.payload["level"])
        elif event.kind == "command" and event.payload["accepted"]:
            kind = event.payload["command"]["type"]
            if kind in ("pause", "resume"):
                paused = kind == "pause"
        frame_type, body = _frame_for(event)
        emit(frame_type, body)
        if (event.kind == "perception"
                and event.payload.get("event") == "pose_update"):
            emit("robot_state", {"pose": event.payload["pose"],
                                 "level": level, "paused": paused})
    return frames


def expected_from_log(log_path: Path) -> dict:
    graph = replay_state(log_path).graph
    object_ids = {obj["id"] for node in graph.nodes.values()
                  for obj in node.get("objects", [])}
    kinds = graph.kind_counts()
    return {
        "revision": graph.revision,
        "red": kinds.get("waypoint", 0),
        "green": kinds.get("frontier", 0),
        "blue": len(object_ids),
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
    }


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        log_path = Path(tmp) / "golden.jsonl"
        config = MissionConfig(scenario=ROOT / "scenarios" / "mock_lab.scn",
                               seed=42, log_path=log_path)
        summary = run_mission(config)
        if summary.outcome != "MissionComplete":
            raise SystemExit(f"golden run did not complete: {summary}")
        frames = frames_from_log(log_path)
        expected = expected_from_log(log_path)

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    frames_path = OUT_DIR / "golden_frames.json"
    frames_path.write_text(json.dumps(frames, separators=(",", ":")) + "\n")
    expected_path = OUT_DIR / "golden_expected.json"
    expected_path.write_text(json.dumps(expected, indent=2) + "\n")
    print(f"{frames_path}: {len(frames)} frames,",
          f"{frames_path.stat().st_size / 1e6:.2f} MB")
    print(f"{expected_path}: {expected}")


if __name__ == "__main__":
    main()
