"""Juxtapose human study results with the six agents on the preset boards."""

from __future__ import annotations

from pathlib import Path

from ..engine import Preset
from ..engine.errors import StateError
from ..experiments import eval_on_presets, load_genome_archive
from ..search import SearchConfig
from .store import TraceStore, summarize_study


class RunError(StateError):
    """Comparison prerequisites missing (no genome archive configured)."""


def compare_with_agents(
    store: TraceStore,
    presets: list[Preset],
    genomes_dir: Path | str | None,
    search: SearchConfig,
    moves_per_game: int = 20,
    repeats: int = 1,
    master_seed: int = 7,
    workers: int = 0,
) -> dict:
    """Per preset board: human average/max/min next to all six agents'
    scores, with the two headline flags — does the score minimizer land
    below the weakest human, does the score maximizer reach the strongest.

    Without human traces the report is agent-only and flags are absent.
    """
    if genomes_dir is None:
        raise RunError("no genome archive configured for comparison")
    genomes = load_genome_archive(genomes_dir)
    table = eval_on_presets(
        presets,
        genomes,
        search,
        moves_per_game=moves_per_game,
        repeats=repeats,
        master_seed=master_seed,
        workers=workers,
    )
    summary = summarize_study(store)
    boards = []
    for preset in presets:
        agents = {
            kind: table.cells[preset.id][kind].score for kind in table.agents
        }
        moves_stats = {
            kind: table.cells[preset.id][kind].mean_available_moves
            for kind in ("maxm", "minm")
        }
        row: dict = {
            "board": preset.id,
            "agents": agents,
            "agent_mean_available_moves": moves_stats,
        }
        human = summary.boards.get(preset.id)
        if human:
            row["human"] = human
            row["flags"] = {
                "mins_below_human_min": agents["mins"] < human["minimum"],
                "maxs_at_or_above_human_max": agents["maxs"] >= human["maximum"],
            }
        boards.append(row)
    return {
        "boards": boards,
        "sessions": summary.sessions,
        "random_average": summary.random_average,
    }
