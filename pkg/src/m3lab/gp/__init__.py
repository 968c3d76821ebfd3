"""Genetic programming of selection heuristics."""

from .evolution import (
    EvalContext,
    EvolutionConfig,
    EvolutionHistory,
    GenerationStats,
    Individual,
    Population,
    crossover,
    desk_evolution_config,
    evaluate_fitness,
    evaluate_heuristic,
    evaluate_population,
    evolve,
    init_population,
    mutate,
    next_generation,
    random_baseline_mean,
)
from .expr import (
    Const,
    Expr,
    ExprHeuristic,
    Op,
    Var,
    compile_expr,
    count_nodes,
    depth,
    equivalent,
    evaluate_expr,
    parse_expr,
    random_expr,
    serialize,
    simplify,
)

__all__ = [
    "Const",
    "EvalContext",
    "EvolutionConfig",
    "EvolutionHistory",
    "Expr",
    "ExprHeuristic",
    "GenerationStats",
    "Individual",
    "Op",
    "Population",
    "Var",
    "compile_expr",
    "count_nodes",
    "crossover",
    "depth",
    "desk_evolution_config",
    "equivalent",
    "evaluate_expr",
    "evaluate_fitness",
    "evaluate_heuristic",
    "evaluate_population",
    "evolve",
    "init_population",
    "mutate",
    "next_generation",
    "parse_expr",
    "random_baseline_mean",
    "random_expr",
    "serialize",
    "simplify",
]
