"""Experiment pipeline: evolution runs with shared per-generation seed
batches, Vanilla-MCTS and Random baselines on the same seeds, stats tables
sufficient to re-plot the evolution curves, and preset-board evaluation.

Every run writes a self-describing directory: manifest, seed batches,
per-generation stats with baseline overlays, elite genome archive, and the
best genome. All numbers are derived from (master_seed, config) alone and
are byte-identical for any worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .engine import BoardConfig, Preset
from .engine.errors import ConfigError
from .gp.evolution import (
    EvolutionConfig,
    EvolutionHistory,
    desk_evolution_config,
    evolve,
)
from .gp.expr import ExprHeuristic, parse_expr
from .personas import (
    Direction,
    Goal,
    PersonaMetric,
    metric_of_trace,
    persona,
)
from .search import (
    MctsAgent,
    RandomAgent,
    SearchConfig,
    Ucb1Heuristic,
    play_heuristic_game,
    play_random_game,
)
from .seeding import derive_rng, normalize_seed

_TAG_RANDOM = 201
_TAG_VANILLA = 202
_TAG_PRESET = 301

GENOME_SCHEMA = "m3-genome/1"

SCALES = ("paper", "desk")


def evolution_config_for(scale: str) -> EvolutionConfig:
    if scale == "paper":
        return EvolutionConfig()
    if scale == "desk":
        return desk_evolution_config()
    raise ConfigError(f"unknown scale {scale!r}; expected one of {SCALES}")


@dataclass(frozen=True)
class ExperimentConfig:
    persona: str = "maxs"
    scale: str = "desk"
    master_seed: int = 7
    root_visits: int = 250
    workers: int = 0
    frozen_seeds: bool = False
    # tests shrink runs below desk scale; the CLI only exposes named scales
    evolution_override: EvolutionConfig | None = None

    def evolution(self) -> EvolutionConfig:
        return self.evolution_override or evolution_config_for(self.scale)

    def board(self) -> BoardConfig:
        return BoardConfig(moves_per_game=self.evolution().moves_per_game)

    def search(self) -> SearchConfig:
        return SearchConfig(
            root_visits=self.root_visits,
            rollout_base=self.evolution().moves_per_game,
        )


@dataclass
class BaselineResult:
    agent: str  # "vanilla" | "random"
    metric: str
    per_seed: list[float]
    per_generation_mean: list[float]

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_seed))


def _random_game_task(args):
    board, master_seed, index, seed = args
    rng = derive_rng(master_seed, _TAG_RANDOM, index)
    record = play_random_game(board, seed, rng)
    return record.final_score, record.avail_counts


def _vanilla_game_task(args):
    board, search, master_seed, index, seed = args
    rng = derive_rng(master_seed, _TAG_VANILLA, index)
    record = play_heuristic_game(
        Ucb1Heuristic(search.exploration_c), board, search,
        PersonaMetric.FINAL_SCORE, seed, rng,
    )
    return record.final_score, record.avail_counts


def _metric_values(results, metric: PersonaMetric) -> list[float]:
    class _Rec:
        def __init__(self, score, counts):
            self.final_score = score
            self.avail_counts = counts

    return [metric_of_trace(_Rec(s, c), metric) for s, c in results]


def _run_tasks(fn, tasks, workers: int):
    if workers and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks, chunksize=1))
    return [fn(t) for t in tasks]


def run_baselines(
    seed_batches: list[list[int]],
    metric: PersonaMetric,
    search: SearchConfig,
    board: BoardConfig,
    master_seed: int,
    workers: int = 0,
) -> tuple[BaselineResult, BaselineResult]:
    """Play every seed of every batch with both baseline agents.

    The vanilla agent always plays score-seeking UCB1; its win threshold is
    the random agent's mean score on the same seeds. The requested metric is
    then measured from both agents' games.
    """
    flat = [(g, i, s) for g, batch in enumerate(seed_batches) for i, s in enumerate(batch)]
    batch_size = len(seed_batches[0]) if seed_batches else 0

    random_results = _run_tasks(
        _random_game_task,
        [(board, master_seed, k, seed) for k, (_g, _i, seed) in enumerate(flat)],
        workers,
    )
    random_score_mean = float(np.mean([s for s, _ in random_results]))
    vanilla_search = SearchConfig(
        root_visits=search.root_visits,
        rollout_base=search.rollout_base,
        exploration_c=search.exploration_c,
        goal=Goal(random_score_mean, Direction.MAXIMIZE),
    )
    vanilla_results = _run_tasks(
        _vanilla_game_task,
        [(board, vanilla_search, master_seed, k, seed) for k, (_g, _i, seed) in enumerate(flat)],
        workers,
    )

    def build(agent, results) -> BaselineResult:
        values = _metric_values(results, metric)
        per_gen = [
            float(np.mean(values[g * batch_size:(g + 1) * batch_size]))
            for g in range(len(seed_batches))
        ]
        return BaselineResult(agent, metric.value, values, per_gen)

    return build("vanilla", vanilla_results), build("random", random_results)


# ---------------------------------------------------------------------------
# run directory artifacts


@dataclass
class RunArtifacts:
    directory: Path
    history: EvolutionHistory
    vanilla: BaselineResult
    random: BaselineResult
    manifest_path: Path
    stats_path: Path
    genome_archive_path: Path
    best_genome_path: Path


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _stats_rows(history: EvolutionHistory, vanilla: BaselineResult, random_: BaselineResult):
    rows = []
    for g, stats in enumerate(history.generations):
        rows.append(
            {
                "generation": g,
                "min": stats.min,
                "median": stats.median,
                "max": stats.max,
                "mean": stats.mean,
                "goal_used": stats.goal_used,
                "vanilla_mean": vanilla.per_generation_mean[g],
                "random_mean": random_.per_generation_mean[g],
            }
        )
    return rows


def _write_csv(path: Path, rows: list[dict], columns: list[str]) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(repr(row[c]) if isinstance(row[c], float) else str(row[c]) for c in columns))
    path.write_text("\n".join(lines) + "\n")


def run_experiment(cfg: ExperimentConfig, out_dir: Path | str, progress=None) -> RunArtifacts:
    """Full pipeline for one persona: evolve, run both baselines on the same
    seed batches, and write the run directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p = persona(cfg.persona)
    evo = cfg.evolution()
    board = cfg.board()
    search = cfg.search()
    master_seed = normalize_seed(cfg.master_seed)

    history = evolve(
        evo,
        p,
        master_seed,
        search=search,
        board=board,
        workers=cfg.workers,
        frozen_seeds=cfg.frozen_seeds,
        progress=progress,
    )
    batches = [g.seed_batch for g in history.generations]
    vanilla, random_ = run_baselines(
        batches, p.metric, search, board, master_seed, workers=cfg.workers
    )

    manifest = {
        "schema": "m3-run/1",
        "persona": p.kind,
        "scale": cfg.scale,
        "master_seed": master_seed,
        "root_visits": cfg.root_visits,
        "workers_used": cfg.workers,
        "frozen_seeds": cfg.frozen_seeds,
        "evolution": asdict(evo),
        "board": asdict(board),
        "random_baseline_goal0": history.random_baseline,
        "files": {
            "stats": "stats.csv",
            "history": "history.jsonl",
            "seed_batches": "seed_batches.json",
            "genome_archive": "genomes.txt",
            "best_genome": "best_genome.json",
            "baselines": "baselines.json",
        },
    }
    manifest_path = out / "manifest.json"
    _write_json(manifest_path, manifest)
    _write_json(out / "seed_batches.json", batches)
    _write_json(
        out / "baselines.json",
        {
            agent.agent: {
                "metric": agent.metric,
                "mean": agent.mean,
                "per_generation_mean": agent.per_generation_mean,
                "per_seed": agent.per_seed,
            }
            for agent in (vanilla, random_)
        },
    )

    stats_path = out / "stats.csv"
    _write_csv(
        stats_path,
        _stats_rows(history, vanilla, random_),
        ["generation", "min", "median", "max", "mean", "goal_used", "vanilla_mean", "random_mean"],
    )

    # one self-contained record per generation
    history_lines = [
        json.dumps(asdict(stats), sort_keys=True) for stats in history.generations
    ]
    (out / "history.jsonl").write_text("\n".join(history_lines) + "\n")

    genome_archive_path = out / "genomes.txt"
    lines = []
    for stats in history.generations:
        for rank, (genome, fit) in enumerate(
            zip(stats.elite_genomes, stats.elite_fitness_raw)
        ):
            lines.append(f"{stats.generation}\t{rank}\t{fit!r}\t{genome}")
    genome_archive_path.write_text("\n".join(lines) + "\n")

    best_genome_path = out / "best_genome.json"
    _write_json(
        best_genome_path,
        {
            "schema": GENOME_SCHEMA,
            "persona": p.kind,
            "genome": history.best_genome,
            "fitness_raw": history.best_fitness_raw,
            "master_seed": master_seed,
            "scale": cfg.scale,
        },
    )

    return RunArtifacts(
        directory=out,
        history=history,
        vanilla=vanilla,
        random=random_,
        manifest_path=manifest_path,
        stats_path=stats_path,
        genome_archive_path=genome_archive_path,
        best_genome_path=best_genome_path,
    )


def emit_plot_data(run_dir: Path | str, out_path: Path | str | None = None) -> Path:
    """Write the plot table for a finished run: per-generation summary plus
    flat baseline overlays, and the 1200-point floor column for runs that
    minimize score."""
    run = Path(run_dir)
    manifest = json.loads((run / "manifest.json").read_text())
    baselines = json.loads((run / "baselines.json").read_text())
    stats_lines = (run / "stats.csv").read_text().strip().split("\n")
    header = stats_lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in stats_lines[1:]]

    vanilla_mean = baselines["vanilla"]["mean"]
    random_mean = baselines["random"]["mean"]
    is_min_score = manifest["persona"] == "mins"
    moves = manifest["evolution"]["moves_per_game"]
    floor = 60 * moves

    columns = ["generation", "min", "median", "max", "mean", "vanilla_mean", "random_mean"]
    if is_min_score:
        columns.append("score_floor")
    out_path = Path(out_path) if out_path else run / "plot_data.csv"
    lines = [",".join(columns)]
    for row in rows:
        values = [
            row["generation"], row["min"], row["median"], row["max"], row["mean"],
            repr(vanilla_mean), repr(random_mean),
        ]
        if is_min_score:
            values.append(repr(float(floor)))
        lines.append(",".join(values))
    out_path.write_text("\n".join(lines) + "\n")
    return out_path


# ---------------------------------------------------------------------------
# preset-board evaluation (the agent-results table)

AGENT_COLUMNS = ("maxs", "mins", "maxm", "minm", "vanilla", "random")


@dataclass
class PresetCell:
    score: float
    mean_available_moves: float


@dataclass
class PresetTable:
    presets: list[str]
    agents: tuple[str, ...]
    cells: dict[str, dict[str, PresetCell]] = field(default_factory=dict)

    def to_text(self) -> str:
        header = ["board"] + [a for a in self.agents]
        widths = [max(len(h), 18) for h in header]
        out = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        for pid in self.presets:
            row = [pid.ljust(widths[0])]
            for a, w in zip(self.agents, widths[1:]):
                cell = self.cells[pid][a]
                text = f"{cell.score:.0f}"
                if a in ("maxm", "minm"):
                    text += f" ({cell.mean_available_moves:.2f})"
                row.append(text.ljust(w))
            out.append("  ".join(row))
        return "\n".join(out)

    def to_json(self) -> dict:
        return {
            "presets": self.presets,
            "agents": list(self.agents),
            "cells": {
                pid: {
                    a: {
                        "score": cell.score,
                        "mean_available_moves": cell.mean_available_moves,
                    }
                    for a, cell in by_agent.items()
                }
                for pid, by_agent in self.cells.items()
            },
        }


def hash_key(*parts) -> int:
    """Stable small integer from strings/ints (not Python's salted hash)."""
    acc = 1469598103934665603  # FNV-1a 64
    for part in parts:
        for byte in str(part).encode():
            acc ^= byte
            acc = (acc * 1099511628211) & ((1 << 64) - 1)
    return acc


def _preset_game_task(args):
    preset_dict, agent_kind, genome_text, search, moves_per_game, master_seed, rep = args
    preset = Preset.from_dict(preset_dict)
    state = preset.new_game(moves_per_game)
    rng = derive_rng(master_seed, _TAG_PRESET, hash_key(preset.id, agent_kind, rep))
    from .engine import play_game

    if agent_kind == "random":
        record = play_game(state, RandomAgent(rng))
    else:
        if agent_kind == "vanilla":
            heuristic = Ucb1Heuristic(search.exploration_c)
            metric = PersonaMetric.FINAL_SCORE
        else:
            heuristic = ExprHeuristic(parse_expr(genome_text))
            metric = persona(agent_kind).metric
        agent = MctsAgent(heuristic, search, metric, rng)
        record = play_game(state, agent)
    return record.final_score, record.avail_counts


def eval_on_presets(
    presets: list[Preset],
    genomes: dict[str, str],
    search: SearchConfig,
    moves_per_game: int = 20,
    repeats: int = 1,
    master_seed: int = 7,
    workers: int = 0,
) -> PresetTable:
    """Play every agent on every preset board; cells average over repeats.

    ``genomes`` maps persona kind to serialized genome text; vanilla's win
    threshold is the random agent's mean score over the same presets.
    """
    missing = [k for k in ("maxs", "mins", "maxm", "minm") if k not in genomes]
    if missing:
        raise ConfigError(f"missing genomes for personas: {missing}")
    master_seed = normalize_seed(master_seed)

    def tasks_for(agent_kind, search_cfg):
        return [
            (p.to_dict(), agent_kind, genomes.get(agent_kind, ""), search_cfg,
             moves_per_game, master_seed, rep)
            for p in presets
            for rep in range(repeats)
        ]

    results: dict[str, list] = {}
    results["random"] = _run_tasks(_preset_game_task, tasks_for("random", search), workers)
    random_mean_score = float(np.mean([s for s, _ in results["random"]]))
    random_mean_moves = float(
        np.mean([np.mean(c) if c else 0.0 for _s, c in results["random"]])
    )
    for kind in ("maxs", "mins", "maxm", "minm", "vanilla"):
        # win thresholds mirror the generation-0 convention: the random
        # agent's mean of the matching metric on these same boards
        if kind == "vanilla":
            goal = Goal(random_mean_score, Direction.MAXIMIZE)
        else:
            p = persona(kind)
            threshold = (
                random_mean_score
                if p.metric is PersonaMetric.FINAL_SCORE
                else random_mean_moves
            )
            goal = Goal(threshold, p.direction)
        agent_search = SearchConfig(
            root_visits=search.root_visits,
            rollout_base=search.rollout_base,
            exploration_c=search.exploration_c,
            goal=goal,
        )
        results[kind] = _run_tasks(_preset_game_task, tasks_for(kind, agent_search), workers)

    table = PresetTable(presets=[p.id for p in presets], agents=AGENT_COLUMNS)
    for pi, preset in enumerate(presets):
        table.cells[preset.id] = {}
        for kind in AGENT_COLUMNS:
            chunk = results[kind][pi * repeats:(pi + 1) * repeats]
            scores = [s for s, _ in chunk]
            avails = [float(np.mean(c)) if c else 0.0 for _s, c in chunk]
            table.cells[preset.id][kind] = PresetCell(
                score=float(np.mean(scores)),
                mean_available_moves=float(np.mean(avails)),
            )
    return table


def load_genome_archive(directory: Path | str) -> dict[str, str]:
    """Collect best genomes per persona from a directory tree containing
    best_genome.json files (run directories or copies)."""
    found: dict[str, str] = {}
    for path in sorted(Path(directory).rglob("best_genome.json")):
        data = json.loads(path.read_text())
        if data.get("schema") != GENOME_SCHEMA:
            continue
        found.setdefault(data["persona"], data["genome"])
    return found
