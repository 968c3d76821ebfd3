"""Command-line interface for the playtesting workbench."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import load_preset_dir
from .engine.presets import make_sample_presets
from .experiments import (
    ExperimentConfig,
    emit_plot_data,
    eval_on_presets,
    evolution_config_for,
    load_genome_archive,
    run_baselines,
    run_experiment,
)
from .personas import PersonaMetric
from .search import SearchConfig
from .seeding import generate_seed_batches


def _add_common(parser):
    parser.add_argument("--master-seed", type=int, default=7)
    parser.add_argument("--workers", type=int, default=0, help="process pool size (0 = inline)")


def cmd_evolve(args) -> int:
    cfg = ExperimentConfig(
        persona=args.persona,
        scale=args.scale,
        master_seed=args.master_seed,
        root_visits=args.root_visits,
        workers=args.workers,
        frozen_seeds=args.frozen_seeds,
    )

    def progress(stats):
        print(
            f"gen {stats.generation:>3}  min {stats.min:>9.2f}  median {stats.median:>9.2f}  "
            f"max {stats.max:>9.2f}  mean {stats.mean:>9.2f}  goal {stats.goal_used:>9.2f}",
            flush=True,
        )

    artifacts = run_experiment(cfg, args.out, progress=progress)
    print(f"run written to {artifacts.directory}")
    print(f"best genome: {artifacts.history.best_genome}")
    print(f"best fitness (raw): {artifacts.history.best_fitness_raw:.2f}")
    return 0


def cmd_baselines(args) -> int:
    evo = evolution_config_for(args.scale)
    board = ExperimentConfig(scale=args.scale).board()
    metric = PersonaMetric(args.metric)
    batches = generate_seed_batches(
        args.master_seed, args.generations or evo.generations, evo.games_per_individual
    )
    search = SearchConfig(root_visits=args.root_visits, rollout_base=evo.moves_per_game)
    vanilla, random_ = run_baselines(
        batches, metric, search, board, args.master_seed, workers=args.workers
    )
    payload = {
        agent.agent: {
            "metric": agent.metric,
            "mean": agent.mean,
            "per_generation_mean": agent.per_generation_mean,
            "per_seed": agent.per_seed,
        }
        for agent in (vanilla, random_)
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "baselines.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"vanilla mean {metric.value}: {vanilla.mean:.2f}")
    print(f"random  mean {metric.value}: {random_.mean:.2f}")
    print(f"written to {out / 'baselines.json'}")
    return 0


def cmd_eval_presets(args) -> int:
    presets = load_preset_dir(args.presets)
    genomes = load_genome_archive(args.genomes)
    table = eval_on_presets(
        presets,
        genomes,
        SearchConfig(root_visits=args.root_visits, rollout_base=args.moves),
        moves_per_game=args.moves,
        repeats=args.repeats,
        master_seed=args.master_seed,
        workers=args.workers,
    )
    print(table.to_text())
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(table.to_json(), indent=2, sort_keys=True) + "\n")
        print(f"written to {out}")
    return 0


def cmd_emit_plots(args) -> int:
    path = emit_plot_data(args.run, args.out)
    print(f"plot data written to {path}")
    return 0


def cmd_make_presets(args) -> int:
    presets = make_sample_presets(args.out, count=args.count, seed=args.seed)
    print(f"wrote {len(presets)} presets to {args.out}: {[p.id for p in presets]}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceSettings, create_app

    app = create_app(
        ServiceSettings(
            presets_dir=args.presets,
            store_dir=args.store,
            genomes_dir=args.genomes,
            moves_per_game=args.moves,
            session_seed=args.session_seed,
            comparison_root_visits=args.root_visits,
            static_dir=args.static,
        )
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_bench(args) -> int:
    from .bench import main as bench_main

    argv = ["--playouts", str(args.playouts), "--searches", str(args.searches)]
    return bench_main(argv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="m3lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="evolve one persona and write a run directory")
    p.add_argument("--persona", required=True, choices=["maxs", "mins", "maxm", "minm"])
    p.add_argument("--scale", default="desk", choices=["paper", "desk"])
    p.add_argument("--out", required=True)
    p.add_argument("--root-visits", type=int, default=250)
    p.add_argument("--frozen-seeds", action="store_true",
                   help="reuse generation 0's seed batch (test mode)")
    _add_common(p)
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("baselines", help="vanilla + random baselines on shared seed batches")
    p.add_argument("--metric", required=True, choices=["score", "moves"])
    p.add_argument("--scale", default="desk", choices=["paper", "desk"])
    p.add_argument("--generations", type=int, default=None,
                   help="override number of seed batches")
    p.add_argument("--out", required=True)
    p.add_argument("--root-visits", type=int, default=250)
    _add_common(p)
    p.set_defaults(fn=cmd_baselines)

    p = sub.add_parser("eval-presets", help="score all six agents on preset boards")
    p.add_argument("--presets", required=True)
    p.add_argument("--genomes", required=True,
                   help="directory tree containing best_genome.json files")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--moves", type=int, default=20)
    p.add_argument("--root-visits", type=int, default=250)
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_eval_presets)

    p = sub.add_parser("emit-plots", help="write plot_data.csv for a finished run")
    p.add_argument("--run", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_emit_plots)

    p = sub.add_parser("make-presets", help="generate sample preset boards")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--seed", type=int, default=99)
    p.set_defaults(fn=cmd_make_presets)

    p = sub.add_parser("serve", help="run the study session service")
    p.add_argument("--presets", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--genomes", default=None)
    p.add_argument("--moves", type=int, default=20)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--session-seed", type=int, default=None)
    p.add_argument("--root-visits", type=int, default=60,
                   help="search budget for the comparison endpoint")
    p.add_argument("--static", default=None, help="serve a built client from this directory")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("bench", help="compare numba kernels against the numpy fallback")
    p.add_argument("--playouts", type=int, default=300)
    p.add_argument("--searches", type=int, default=5)
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
