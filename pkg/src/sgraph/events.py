"""Mission events and the JSON Lines log they are written to.

A log file starts with one header record and then holds one event per line.
Lines are UTF-8 with plain newline separators, and every dict written here
has a fixed key order, so two identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

EVENT_KINDS = frozenset({
    "perception", "graph_delta", "plan", "decision", "behavior_outcome",
    "command", "autonomy_changed", "notification", "mission_complete",
})


class LogError(Exception):
    pass


class CorruptLog(LogError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class LogWriteError(LogError):
    pass


@dataclass(frozen=True)
class MissionEvent:
    seq: int
    step: int
    kind: str
    payload: dict

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    def to_json(self) -> dict:
        return {"seq": self.seq, "step": self.step, "kind": self.kind,
                "payload": self.payload}

    @classmethod
    def from_json(cls, data: dict) -> MissionEvent:
        return cls(data["seq"], data["step"], data["kind"], data["payload"])


@dataclass(frozen=True)
class LogHeader:
    config_digest: str
    scenario_name: str
    seed: int

    def to_json(self) -> dict:
        return {"type": "header", "config_digest": self.config_digest,
                "scenario_name": self.scenario_name, "seed": self.seed}

    @classmethod
    def from_json(cls, data: dict) -> LogHeader:
        return cls(data["config_digest"], data["scenario_name"], data["seed"])


def _dump(data: dict) -> str:
    return json.dumps(data, separators=(",", ":"))


class EventLog:
    """Append-only event sink; pass path=None for an in-memory log."""

    def __init__(self, path: str | Path | None, header: LogHeader):
        self.header = header
        self.last_seq = 0
        self._file = None
        if path is not None:
            try:
                self._file = open(path, "w", encoding="utf-8", newline="\n")
                self._file.write(_dump(header.to_json()) + "\n")
            except OSError as exc:
                raise LogWriteError(str(exc)) from exc

    def append(self, event: MissionEvent) -> None:
        if event.seq <= self.last_seq:
            raise LogWriteError(
                f"seq {event.seq} does not advance past {self.last_seq}")
        self.last_seq = event.seq
        if self._file is not None:
            try:
                self._file.write(_dump(event.to_json()) + "\n")
            except OSError as exc:
                raise LogWriteError(str(exc)) from exc

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None


def read_log(path: str | Path) -> tuple[LogHeader, list[MissionEvent]]:
    """Parse a log file; any malformed line raises CorruptLog with its number."""
    with open(path, encoding="utf-8") as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # the trailing newline of a complete file

    if not lines:
        raise CorruptLog(1, "missing header")
    try:
        head = json.loads(lines[0])
        if not isinstance(head, dict) or head.get("type") != "header":
            raise CorruptLog(1, "first record is not a header")
        header = LogHeader.from_json(head)
    except CorruptLog:
        raise
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CorruptLog(1, f"bad header: {exc}") from exc

    events: list[MissionEvent] = []
    last_seq = 0
    for number, line in enumerate(lines[1:], start=2):
        try:
            data = json.loads(line)
            event = MissionEvent.from_json(data)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptLog(number, f"bad event: {exc}") from exc
        if event.seq <= last_seq:
            raise CorruptLog(number, f"seq {event.seq} does not advance past {last_seq}")
        last_seq = event.seq
        events.append(event)
    return header, events
