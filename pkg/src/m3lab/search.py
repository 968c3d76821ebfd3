"""Monte Carlo tree search over the engine's forward model.

The selection heuristic is pluggable: the vanilla agent scores children
with UCB1, persona agents with an evolved expression. The same heuristic
ranks children during descent and picks the final move at the root.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .engine import Move, legal_moves
from .engine.errors import EngineFault, StateError
from .engine.game import GameState
from .engine import kernels
from .personas import Direction, Goal, PersonaMetric

#: Returned for unvisited children so they are explored before any ranking.
UNVISITED_SENTINEL = math.inf


class HeuristicContext(NamedTuple):
    """The four node statistics a selection heuristic may consume."""

    child_wins: float
    child_visits: float
    parent_visits: float
    child_available_moves: float


def ucb1(ctx: HeuristicContext, c: float) -> float:
    """Win rate plus exploration bonus; total on every reachable context."""
    if ctx.child_visits == 0:
        return UNVISITED_SENTINEL
    xbar = ctx.child_wins / ctx.child_visits
    if ctx.parent_visits <= 0:
        return xbar
    return xbar + c * math.sqrt(2.0 * math.log(ctx.parent_visits) / ctx.child_visits)


@dataclass(frozen=True)
class Ucb1Heuristic:
    c: float = 1.0 / math.sqrt(2.0)

    def evaluate(self, ctx: HeuristicContext) -> float:
        return ucb1(ctx, self.c)


@dataclass
class NodeStats:
    visits: int = 0
    wins: int = 0
    reward_sum: float = 0.0


class SearchNode:
    __slots__ = (
        "state",
        "incoming_move",
        "stats",
        "children",
        "child_ranks",
        "untried",
        "legal",
        "available_moves",
    )

    def __init__(self, state: GameState, incoming_move: Move | None):
        self.state = state
        self.incoming_move = incoming_move
        self.stats = NodeStats()
        self.children: list[SearchNode] = []
        self.child_ranks: list[int] = []
        at_cap = state.moves_made >= state.config.moves_per_game
        self.legal = [] if at_cap else legal_moves(state.grid)
        self.available_moves = (
            int(kernels.count_moves(state.grid)) if at_cap else len(self.legal)
        )
        self.untried = list(self.legal)

    @property
    def is_terminal(self) -> bool:
        return not self.untried and not self.children


@dataclass(frozen=True)
class SearchConfig:
    root_visits: int = 250
    rollout_base: int = 20
    exploration_c: float = 1.0 / math.sqrt(2.0)
    goal: Goal = Goal(0.0, Direction.MAXIMIZE)


def rollout_length_for(rollout_base: int, moves_made: int) -> int:
    """Rollout budget shrinks one-for-one with real moves made, floored at 1."""
    return max(1, rollout_base - moves_made)


def _context_for(parent: "SearchNode", child: "SearchNode") -> HeuristicContext:
    return HeuristicContext(
        child_wins=child.stats.wins,
        child_visits=child.stats.visits,
        parent_visits=parent.stats.visits,
        child_available_moves=child.available_moves,
    )


def _best_child(node: "SearchNode", heuristic) -> "SearchNode":
    best = None
    best_value = -math.inf
    for child in node.children:  # kept in move scan order: first best wins ties
        value = heuristic.evaluate(_context_for(node, child))
        if value > best_value:
            best_value = value
            best = child
    return best


def select(root: SearchNode, heuristic) -> list[SearchNode]:
    """Descend from the root through fully expanded nodes by heuristic
    argmax, stopping at a node with untried moves or a terminal node."""
    path = [root]
    node = root
    while not node.untried and node.children:
        node = _best_child(node, heuristic)
        path.append(node)
    return path


def expand(node: SearchNode, rng: np.random.Generator) -> SearchNode:
    """Take one random untried move, apply it on a forked state, and attach
    the resulting child (children stay sorted by move scan order)."""
    if not node.untried:
        raise StateError("expand called on a node with no untried moves")
    i = int(rng.integers(len(node.untried)))
    move = node.untried.pop(i)
    state = node.state.fork()
    (r0, c0), (r1, c1) = move.a, move.b
    refill = state.refill
    points = kernels.swap_and_resolve(
        state.grid, r0, c0, r1, c1,
        refill.qarr, refill.qlen, refill.qpos, refill.state,
        state.config.num_colors,
    )
    if points <= 0:
        raise EngineFault(f"legal move {move} failed to produce a match")
    state.score += int(points)
    state.moves_made += 1
    child = SearchNode(state, move)
    rank = node.legal.index(move)
    pos = bisect.bisect_left(node.child_ranks, rank)
    node.child_ranks.insert(pos, rank)
    node.children.insert(pos, child)
    return child


def rollout(
    state: GameState,
    length: int,
    metric: PersonaMetric,
    rng: np.random.Generator,
) -> float:
    """Play up to ``length`` uniformly random legal moves on a copy and
    return the trajectory's persona metric. Dead boards reshuffle and play
    continues; the game's total move cap still applies."""
    sim = state.fork()
    budget = min(length, sim.config.moves_per_game - sim.moves_made)
    if budget <= 0:
        return float(sim.score) if metric is PersonaMetric.FINAL_SCORE else 0.0
    srng = kernels.new_rng_state(int(rng.integers(0, 2**64, dtype=np.uint64)))
    refill = sim.refill
    gained, avail_sum, played = kernels.random_playout(
        sim.grid, refill.qarr, refill.qlen, refill.qpos, refill.state,
        srng, sim.config.num_colors, budget,
    )
    if gained < 0:
        raise EngineFault("random playout hit an internal bound")
    if metric is PersonaMetric.FINAL_SCORE:
        return float(sim.score + int(gained))
    return float(avail_sum) / played if played else 0.0


def backpropagate(path: list[SearchNode], outcome: float, goal: Goal) -> None:
    won = goal.is_win(outcome)
    for node in path:
        node.stats.visits += 1
        node.stats.reward_sum += outcome
        if won:
            node.stats.wins += 1


def run_search(
    state: GameState,
    heuristic,
    config: SearchConfig,
    metric: PersonaMetric,
    rng: np.random.Generator,
) -> Move:
    """One full tree search; returns the move of the best immediate child
    of the root under the same heuristic used for descent."""
    if state.moves_made >= state.config.moves_per_game:
        raise StateError("search requested on a finished game")
    root = SearchNode(state.fork(), None)
    if not root.legal:
        raise StateError("search requires at least one legal move; reshuffle first")
    length = rollout_length_for(config.rollout_base, state.moves_made)
    for _ in range(config.root_visits):
        path = select(root, heuristic)
        node = path[-1]
        if node.untried:
            node = expand(node, rng)
            path.append(node)
        outcome = rollout(node.state, length, metric, rng)
        backpropagate(path, outcome, config.goal)
    best = _best_child(root, heuristic)
    return best.incoming_move


def random_agent_move(state: GameState, rng: np.random.Generator) -> Move:
    moves = legal_moves(state.grid)
    if not moves:
        raise StateError("no legal moves; reshuffle first")
    return moves[int(rng.integers(len(moves)))]


class MctsAgent:
    """Plays full games with one search per real move.

    A fresh tree is built per move; ``rollout_lengths`` records the budget
    used for each real move (the schedule 20, 19, ..., 1 at defaults).
    """

    def __init__(self, heuristic, config: SearchConfig, metric: PersonaMetric, rng):
        self.heuristic = heuristic
        self.config = config
        self.metric = metric
        self.rng = rng
        self.rollout_lengths: list[int] = []

    def __call__(self, state: GameState) -> Move:
        self.rollout_lengths.append(
            rollout_length_for(self.config.rollout_base, state.moves_made)
        )
        return run_search(state, self.heuristic, self.config, self.metric, self.rng)


@dataclass
class RandomAgent:
    rng: np.random.Generator

    def __call__(self, state: GameState) -> Move:
        return random_agent_move(state, self.rng)


def play_heuristic_game(
    heuristic,
    board_config,
    search_config: SearchConfig,
    metric: PersonaMetric,
    game_seed: int,
    agent_rng: np.random.Generator,
):
    """One full game driven by tree search; returns the GameRecord."""
    from .engine import RefillSource, new_game, play_game

    state = new_game(board_config, RefillSource.seeded(game_seed, board_config.width))
    agent = MctsAgent(heuristic, search_config, metric, agent_rng)
    return play_game(state, agent)


def play_random_game(board_config, game_seed: int, agent_rng: np.random.Generator):
    """One full uniformly random game; returns the GameRecord."""
    from .engine import RefillSource, new_game, play_game

    state = new_game(board_config, RefillSource.seeded(game_seed, board_config.width))
    return play_game(state, RandomAgent(agent_rng))
