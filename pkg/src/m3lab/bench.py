"""Benchmark the compiled kernels against the pure-numpy fallback.

Run as ``m3lab bench`` (or ``python -m m3lab.bench``). The parent process
measures one mode and re-invokes itself with ``M3LAB_NO_NUMBA=1`` for the
other, then prints a comparison table; results from the two paths are also
checked for equality.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _measure(playouts: int, searches: int) -> dict:
    from .engine import BoardConfig, RefillSource, new_game
    from .engine import kernels
    from .personas import Direction, Goal, PersonaMetric
    from .search import SearchConfig, Ucb1Heuristic, run_search

    config = BoardConfig()
    state = new_game(config, RefillSource.seeded(12345))
    grid = state.grid

    timings: dict[str, float] = {}
    checks: dict[str, float] = {}

    def timed(name, fn, rounds):
        fn()  # warmup / jit compile
        t0 = time.perf_counter()
        for _ in range(rounds):
            fn()
        timings[name] = (time.perf_counter() - t0) / rounds

    timed("match_labels", lambda: kernels.match_labels(grid), 3000)
    timed("count_moves", lambda: kernels.count_moves(grid), 3000)

    def one_playout():
        sim = state.fork()
        refill = sim.refill
        rng = kernels.new_rng_state(7)
        srng = kernels.new_rng_state(11)
        out = kernels.random_playout(
            sim.grid, refill.qarr, refill.qlen, refill.qpos, refill.state,
            srng, config.num_colors, 20,
        )
        return int(out[0])

    timed("random_playout_20", one_playout, playouts)
    checks["playout_points"] = one_playout()

    def one_search():
        cfg = SearchConfig(
            root_visits=50, rollout_base=20, goal=Goal(2000.0, Direction.MAXIMIZE)
        )
        move = run_search(
            state, Ucb1Heuristic(), cfg, PersonaMetric.FINAL_SCORE,
            np.random.default_rng(3),
        )
        return [list(move.a), list(move.b)]

    timed("mcts_search_50_visits", one_search, searches)
    checks["search_move"] = one_search()

    return {"numba": kernels.USE_NUMBA, "timings": timings, "checks": checks}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="kernel benchmark: numba vs numpy fallback")
    parser.add_argument("--playouts", type=int, default=300)
    parser.add_argument("--searches", type=int, default=5)
    parser.add_argument("--single", action="store_true", help="measure this process only")
    parser.add_argument("--json", action="store_true", help="emit machine-readable output")
    args = parser.parse_args(argv)

    mine = _measure(args.playouts, args.searches)
    if args.single or args.json:
        print(json.dumps(mine))
        return 0

    env = dict(os.environ)
    if mine["numba"]:
        env["M3LAB_NO_NUMBA"] = "1"
    else:
        env.pop("M3LAB_NO_NUMBA", None)
    other_raw = subprocess.run(
        [sys.executable, "-m", "m3lab.bench", "--single", "--json",
         "--playouts", str(max(10, args.playouts // 20)),
         "--searches", str(max(1, args.searches // 5))],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    other = json.loads(other_raw.stdout.strip().splitlines()[-1])

    fast, slow = (mine, other) if mine["numba"] else (other, mine)
    if fast["checks"] != slow["checks"]:
        print("WARNING: paths disagree!", fast["checks"], slow["checks"])
        return 1
    print(f"{'kernel':<24} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name in fast["timings"]:
        a = fast["timings"][name]
        b = slow["timings"][name]
        print(f"{name:<24} {a * 1e6:>10.1f}us {b * 1e6:>10.1f}us {b / a:>8.1f}x")
    print("paths agree on checked outputs:", fast["checks"])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
