"""Genetic programming over selection heuristics: uniqueness-filtered
populations and the elites + mutation + crossover generation procedure.

Populations never contain two equivalent genomes. Each generation keeps the
top slice by fitness unchanged, fills half the remaining slots with
mutants of uniformly sampled members, and the rest with crossover offspring
drawn from a shuffled list of all parent pairs. The previous generation's
best fitness becomes the win threshold the next generation searches against.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..engine import BoardConfig
from ..engine.errors import ConfigError, EngineFault, StateError
from ..personas import Goal, Persona, PersonaMetric, fitness_of, metric_of_trace, raw_of_fitness
from ..search import SearchConfig, play_heuristic_game, play_random_game
from ..seeding import derive_rng, generate_seed_batches
from .expr import (
    Const,
    Expr,
    ExprHeuristic,
    const_indices,
    count_nodes,
    depth,
    equivalent,
    random_expr,
    replace_at,
    serialize,
    subtree_at,
)

#: structural rng tags (tuple shapes keep these distinct from game keys)
_TAG_EVOLUTION = 101
_TAG_RANDOM_BASELINE = 102

_UNIQUENESS_ATTEMPT_CAP = 100_000


@dataclass
class Individual:
    genome: Expr
    fitness: float | None = None
    id: int = -1

    def copy(self) -> "Individual":
        return Individual(self.genome, self.fitness, self.id)


@dataclass
class Population:
    members: list[Individual]
    generation_index: int = 0


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 100
    elite_fraction: float = 0.10
    mutation_slots: int = 45
    crossover_slots: int = 45
    generations: int = 100
    constant_mutation_prob: float = 0.5
    depth_init: tuple[int, int] = (2, 6)
    depth_cap_post_variation: int = 10
    games_per_individual: int = 50
    moves_per_game: int = 20
    enable_subtraction: bool = False
    # crossover pairs come from the pre-variation population, not from
    # freshly admitted mutants; recorded here so run manifests carry it
    crossover_parent_pool: str = "parents"

    @property
    def elite_count(self) -> int:
        return round(self.population_size * self.elite_fraction)

    def validate(self) -> None:
        if self.elite_count + self.mutation_slots + self.crossover_slots != self.population_size:
            raise ConfigError(
                "elites + mutation_slots + crossover_slots must equal population_size "
                f"({self.elite_count} + {self.mutation_slots} + {self.crossover_slots} "
                f"!= {self.population_size})"
            )
        if self.depth_init[0] < 1 or self.depth_init[1] < self.depth_init[0]:
            raise ConfigError(f"bad init depth range {self.depth_init}")
        if self.crossover_parent_pool != "parents":
            raise ConfigError(
                f"unsupported crossover_parent_pool {self.crossover_parent_pool!r}"
            )


def desk_evolution_config() -> EvolutionConfig:
    """Reduced preset sized so the full four-persona suite runs on a laptop."""
    return EvolutionConfig(
        population_size=20,
        mutation_slots=9,
        crossover_slots=9,
        generations=10,
        games_per_individual=10,
        moves_per_game=10,
    )


def _is_duplicate(candidate: Expr, admitted: list[Individual]) -> bool:
    return any(equivalent(candidate, member.genome) for member in admitted)


def init_population(cfg: EvolutionConfig, rng: np.random.Generator, ids) -> Population:
    """Rejection-sample random trees until the population is pairwise
    non-equivalent; later-arriving duplicates are discarded."""
    cfg.validate()
    members: list[Individual] = []
    rejections = 0
    lo, hi = cfg.depth_init
    while len(members) < cfg.population_size:
        genome = random_expr(rng, lo, hi, cfg.enable_subtraction)
        if _is_duplicate(genome, members):
            rejections += 1
            if rejections >= _UNIQUENESS_ATTEMPT_CAP:
                raise EngineFault("could not fill a unique initial population")
            continue
        rejections = 0
        members.append(Individual(genome, None, next(ids)))
    return Population(members, 0)


def mutate(ind: Individual, rng: np.random.Generator, cfg: EvolutionConfig, ids) -> Individual:
    """Optionally redraw one constant (p=0.5), then replace one uniformly
    chosen node with a fresh subtree of depth <= 3. Retries until the result
    fits under the post-variation depth cap, else returns an unchanged copy."""
    for _ in range(50):
        genome = ind.genome
        if rng.random() < cfg.constant_mutation_prob:
            consts = const_indices(genome)
            if consts:
                where = consts[int(rng.integers(len(consts)))]
                genome = replace_at(
                    genome, where, Const(float(rng.uniform(0.0, 10.0)))
                )
        where = int(rng.integers(count_nodes(genome)))
        subtree = random_expr(rng, 1, 3, cfg.enable_subtraction)
        candidate = replace_at(genome, where, subtree)
        if depth(candidate) <= cfg.depth_cap_post_variation:
            return Individual(candidate, None, next(ids))
    return Individual(ind.genome, None, next(ids))


def crossover(
    a: Individual, b: Individual, rng: np.random.Generator, cfg: EvolutionConfig, ids
) -> tuple[Individual, Individual]:
    """Swap one uniformly chosen subtree between the parents; depth-capped
    with retry like mutate."""
    for _ in range(50):
        ia = int(rng.integers(count_nodes(a.genome)))
        ib = int(rng.integers(count_nodes(b.genome)))
        sub_a = subtree_at(a.genome, ia)
        sub_b = subtree_at(b.genome, ib)
        child_a = replace_at(a.genome, ia, sub_b)
        child_b = replace_at(b.genome, ib, sub_a)
        if (
            depth(child_a) <= cfg.depth_cap_post_variation
            and depth(child_b) <= cfg.depth_cap_post_variation
        ):
            return (
                Individual(child_a, None, next(ids)),
                Individual(child_b, None, next(ids)),
            )
    return Individual(a.genome, None, next(ids)), Individual(b.genome, None, next(ids))


def _ranked(members: list[Individual]) -> list[Individual]:
    if any(m.fitness is None for m in members):
        raise StateError("next_generation requires a fully evaluated population")
    return sorted(members, key=lambda m: (-m.fitness, m.id))


def next_generation(
    pop: Population, cfg: EvolutionConfig, rng: np.random.Generator, ids
) -> Population:
    """Elites unchanged, then mutants, then crossover offspring, all filtered
    for pairwise non-equivalence against everything already admitted."""
    cfg.validate()
    ranked = _ranked(pop.members)
    admitted: list[Individual] = [m.copy() for m in ranked[: cfg.elite_count]]

    base_ids = rng.choice(len(pop.members), size=cfg.mutation_slots, replace=False)
    total_attempts = 0
    for slot in range(cfg.mutation_slots):
        base = pop.members[int(base_ids[slot])]
        while True:
            total_attempts += 1
            if total_attempts > _UNIQUENESS_ATTEMPT_CAP:
                raise EngineFault("mutation could not produce enough unique genomes")
            candidate = mutate(base, rng, cfg, ids)
            if not _is_duplicate(candidate.genome, admitted):
                admitted.append(candidate)
                break
            if total_attempts % 200 == 0:
                # persistent duplicates: move on to a different base member
                base = pop.members[int(rng.integers(len(pop.members)))]

    pairs = list(itertools.combinations(range(len(pop.members)), 2))
    passes = 0
    while len(admitted) < cfg.population_size:
        order = rng.permutation(len(pairs))
        for k in order:
            i, j = pairs[int(k)]
            off_a, off_b = crossover(pop.members[i], pop.members[j], rng, cfg, ids)
            for off in (off_a, off_b):
                if len(admitted) >= cfg.population_size:
                    break  # excess offspring from the final pair discarded
                if not _is_duplicate(off.genome, admitted):
                    admitted.append(off)
            if len(admitted) >= cfg.population_size:
                break
        else:
            passes += 1
            if passes >= 10:
                raise EngineFault("crossover could not fill the population")
    return Population(admitted, pop.generation_index + 1)


# ---------------------------------------------------------------------------
# fitness evaluation


@dataclass(frozen=True)
class EvalContext:
    """Everything one fitness evaluation needs besides the genome."""

    persona: Persona
    board: BoardConfig
    search: SearchConfig
    master_seed: int
    generation: int


def _play_metric_game(
    heuristic, ctx: EvalContext, agent_key: int, seed_index: int, game_seed: int
) -> float:
    agent_rng = derive_rng(ctx.master_seed, ctx.generation, agent_key, seed_index)
    record = play_heuristic_game(
        heuristic, ctx.board, ctx.search, ctx.persona.metric, game_seed, agent_rng
    )
    return metric_of_trace(record, ctx.persona.metric)


def evaluate_heuristic(heuristic, agent_key: int, seeds: list[int], ctx: EvalContext) -> float:
    """Fitness of any selection heuristic: direction-adjusted mean metric
    over one game per seed."""
    values = [
        _play_metric_game(heuristic, ctx, agent_key, i, seed)
        for i, seed in enumerate(seeds)
    ]
    mean = float(np.mean(values))
    return fitness_of(mean, ctx.persona.direction)


def evaluate_fitness(ind: Individual, seeds: list[int], ctx: EvalContext) -> float:
    return evaluate_heuristic(ExprHeuristic(ind.genome), ind.id, seeds, ctx)


def _fitness_task(args) -> float:
    genome_text, ind_id, seeds, ctx = args
    from .expr import parse_expr

    return evaluate_fitness(Individual(parse_expr(genome_text), None, ind_id), seeds, ctx)


def evaluate_population(
    members: list[Individual],
    seeds: list[int],
    ctx: EvalContext,
    workers: int = 0,
    reevaluate: bool = True,
) -> None:
    """Fill in fitness for every member (skipping already evaluated ones
    unless ``reevaluate``); parallel across individuals, order-stable."""
    todo = [
        m for m in members if reevaluate or m.fitness is None
    ]
    if not todo:
        return
    if workers and workers > 1 and len(todo) > 1:
        tasks = [(serialize(m.genome), m.id, list(seeds), ctx) for m in todo]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_fitness_task, tasks, chunksize=1))
        for member, fitness in zip(todo, results):
            member.fitness = fitness
    else:
        for member in todo:
            member.fitness = evaluate_fitness(member, seeds, ctx)


def random_baseline_mean(
    seeds: list[int], board: BoardConfig, metric: PersonaMetric, master_seed: int
) -> float:
    """Mean metric of the uniformly random agent over the seed batch; the
    generation-0 goal threshold."""
    values = []
    for i, seed in enumerate(seeds):
        rng = derive_rng(master_seed, _TAG_RANDOM_BASELINE, i)
        record = play_random_game(board, seed, rng)
        values.append(metric_of_trace(record, metric))
    return float(np.mean(values))


# ---------------------------------------------------------------------------
# the evolution loop


@dataclass
class GenerationStats:
    generation: int
    min: float
    median: float
    max: float
    mean: float
    goal_used: float
    seed_batch: list[int]
    best_id: int
    best_genome: str
    elite_genomes: list[str] = field(default_factory=list)
    elite_fitness_raw: list[float] = field(default_factory=list)


@dataclass
class EvolutionHistory:
    persona: str
    master_seed: int
    frozen_seeds: bool
    generations: list[GenerationStats] = field(default_factory=list)
    best_genome: str = ""
    best_fitness_raw: float = 0.0
    random_baseline: float = 0.0

    @property
    def goal_sequence(self) -> list[float]:
        return [g.goal_used for g in self.generations]


def evolve(
    cfg: EvolutionConfig,
    persona: Persona,
    master_seed: int,
    search: SearchConfig | None = None,
    board: BoardConfig | None = None,
    workers: int = 0,
    frozen_seeds: bool = False,
    progress=None,
) -> EvolutionHistory:
    """Run the full evolutionary loop for one persona.

    Per generation: evaluate everyone on that generation's seed batch (a
    frozen batch reuses generation 0's and skips re-evaluating carried-over
    elites), record min/median/max/mean, then set the next generation's win
    threshold to this generation's best fitness. Generation 0 searches
    against the random agent's mean on its batch.
    """
    cfg.validate()
    board = board or BoardConfig(moves_per_game=cfg.moves_per_game)
    search = search or SearchConfig(rollout_base=cfg.moves_per_game)
    ids = itertools.count()
    rng = derive_rng(master_seed, _TAG_EVOLUTION)
    batches = generate_seed_batches(master_seed, cfg.generations, cfg.games_per_individual)
    if frozen_seeds:
        batches = [batches[0]] * cfg.generations

    pop = init_population(cfg, rng, ids)
    baseline = random_baseline_mean(batches[0], board, persona.metric, master_seed)
    goal_raw = baseline
    history = EvolutionHistory(
        persona=persona.kind,
        master_seed=master_seed,
        frozen_seeds=frozen_seeds,
        random_baseline=baseline,
    )

    for generation in range(cfg.generations):
        batch = batches[generation]
        ctx = EvalContext(
            persona=persona,
            board=board,
            search=SearchConfig(
                root_visits=search.root_visits,
                rollout_base=search.rollout_base,
                exploration_c=search.exploration_c,
                goal=Goal(goal_raw, persona.direction),
            ),
            master_seed=master_seed,
            generation=generation,
        )
        evaluate_population(
            pop.members, batch, ctx, workers=workers, reevaluate=not frozen_seeds
        )
        raw = [raw_of_fitness(m.fitness, persona.direction) for m in pop.members]
        ranked = _ranked(pop.members)
        best = ranked[0]
        elites = ranked[: cfg.elite_count]
        stats = GenerationStats(
            generation=generation,
            min=float(np.min(raw)),
            median=float(np.median(raw)),
            max=float(np.max(raw)),
            mean=float(np.mean(raw)),
            goal_used=goal_raw,
            seed_batch=list(batch),
            best_id=best.id,
            best_genome=serialize(best.genome),
            elite_genomes=[serialize(m.genome) for m in elites],
            elite_fitness_raw=[raw_of_fitness(m.fitness, persona.direction) for m in elites],
        )
        history.generations.append(stats)
        if progress is not None:
            progress(stats)
        goal_raw = raw_of_fitness(best.fitness, persona.direction)
        history.best_genome = serialize(best.genome)
        history.best_fitness_raw = goal_raw
        if generation < cfg.generations - 1:
            pop = next_generation(pop, cfg, rng, ids)
    return history
