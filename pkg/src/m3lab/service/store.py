"""Append-only trace store and study summaries.

One JSONL file per session; every persisted trace (schema ``m3-trace/1``)
is replayed through the engine before it is written, so a stored trace is
guaranteed to reproduce its recorded final score.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..engine import BoardConfig, Move, ReshuffleEvent, SpawnEvent, replay_game
from ..engine.errors import EngineFault
from ..personas import PersonaMetric

TRACE_SCHEMA = "m3-trace/1"


def spawn_log_to_json(spawn_log) -> list:
    out = []
    for ev in spawn_log:
        if isinstance(ev, SpawnEvent):
            out.append(["s", ev.cell[0], ev.cell[1], ev.color])
        else:
            out.append(["r", list(ev.grid)])
    return out


def spawn_log_from_json(entries) -> list:
    out = []
    for ev in entries:
        if ev[0] == "s":
            out.append(SpawnEvent((int(ev[1]), int(ev[2])), int(ev[3])))
        else:
            out.append(ReshuffleEvent([int(x) for x in ev[1]]))
    return out


def replay_trace(trace: dict) -> int:
    """Re-simulate a trace dict; returns the replayed final score."""
    cfg = trace["config"]
    config = BoardConfig(
        width=int(cfg["width"]),
        height=int(cfg["height"]),
        num_colors=int(cfg["num_colors"]),
        moves_per_game=int(cfg["moves_per_game"]),
    )
    moves = [Move.of(tuple(m["a"]), tuple(m["b"])) for m in trace["moves"]]
    record = replay_game(
        config,
        trace["initial_grid"],
        moves,
        spawn_log_from_json(trace["spawns"]),
    )
    return record.final_score


class TraceStore:
    """Directory-backed store: one append-only JSONL file per session."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.jsonl"

    def _append(self, session_id: str, payload: dict) -> None:
        line = json.dumps(payload, sort_keys=True)
        with self._lock:
            with self._path(session_id).open("a") as fh:
                fh.write(line + "\n")

    def open_session(self, session_id: str, meta: dict) -> None:
        self._append(session_id, {"kind": "session", **meta})

    def append_trace(self, session_id: str, trace: dict) -> None:
        replayed = replay_trace(trace)
        if replayed != trace["final_score"]:
            raise EngineFault(
                f"trace integrity check failed: replayed {replayed}, "
                f"recorded {trace['final_score']}"
            )
        self._append(session_id, {"kind": "trace", "trace": trace})

    def close_session(self, session_id: str, round_scores: list[int]) -> None:
        self._append(session_id, {"kind": "close", "round_scores": round_scores})

    def load_sessions(self) -> dict[str, dict]:
        """All sessions on disk: meta, traces, and closed flag."""
        sessions: dict[str, dict] = {}
        for path in sorted(self.directory.glob("*.jsonl")):
            meta: dict = {}
            traces: list[dict] = []
            closed = False
            for line in path.read_text().splitlines():
                entry = json.loads(line)
                if entry["kind"] == "session":
                    meta = entry
                elif entry["kind"] == "trace":
                    traces.append(entry["trace"])
                elif entry["kind"] == "close":
                    closed = True
            sessions[path.stem] = {"meta": meta, "traces": traces, "closed": closed}
        return sessions

    def traces(self) -> list[dict]:
        return [t for s in self.load_sessions().values() for t in s["traces"]]


@dataclass
class StudySummary:
    """Score statistics in the study-report shape: one column per preset
    board plus one for each participant's random-board average."""

    boards: dict[str, dict[str, float]] = field(default_factory=dict)
    random_average: dict[str, float] | None = None
    sessions: int = 0

    def to_json(self) -> dict:
        return {
            "rows": ["average", "maximum", "minimum"],
            "boards": self.boards,
            "random_average": self.random_average,
            "sessions": self.sessions,
        }


def _stats(values: list[float]) -> dict[str, float]:
    return {
        "average": float(np.mean(values)),
        "maximum": float(np.max(values)),
        "minimum": float(np.min(values)),
    }


def summarize_study(store: TraceStore) -> StudySummary:
    """Per preset board: average/max/min of final scores across sessions.
    Random rounds are first averaged within each session, then summarized
    across sessions."""
    sessions = store.load_sessions()
    by_preset: dict[str, list[float]] = {}
    random_means: list[float] = []
    for data in sessions.values():
        random_scores = []
        for trace in data["traces"]:
            spec = trace["round_spec"]
            if spec["kind"] == "preset":
                by_preset.setdefault(spec["preset_id"], []).append(trace["final_score"])
            else:
                random_scores.append(trace["final_score"])
        if random_scores:
            random_means.append(float(np.mean(random_scores)))
    summary = StudySummary(sessions=len(sessions))
    for pid in sorted(by_preset):
        summary.boards[pid] = _stats(by_preset[pid])
    if random_means:
        summary.random_average = _stats(random_means)
    return summary


def trace_metric(trace: dict, metric: PersonaMetric) -> float:
    if metric is PersonaMetric.FINAL_SCORE:
        return float(trace["final_score"])
    counts = trace.get("avail_counts") or []
    return float(np.mean(counts)) if counts else 0.0
