"""The four play personas: what they measure, which way they optimize, and
what counts as a win against the current goal.

Two metrics exist: the final score of a game, and the mean number of
available moves sampled after each completed move. Each metric has a
maximizing and a minimizing persona, giving MaxS, MinS, MaxM, MinM.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .engine.errors import ConfigError


class PersonaMetric(Enum):
    FINAL_SCORE = "score"
    MEAN_AVAILABLE_MOVES = "moves"


class Direction(Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


@dataclass(frozen=True)
class Persona:
    kind: str  # maxs | mins | maxm | minm
    metric: PersonaMetric
    direction: Direction


PERSONAS = {
    "maxs": Persona("maxs", PersonaMetric.FINAL_SCORE, Direction.MAXIMIZE),
    "mins": Persona("mins", PersonaMetric.FINAL_SCORE, Direction.MINIMIZE),
    "maxm": Persona("maxm", PersonaMetric.MEAN_AVAILABLE_MOVES, Direction.MAXIMIZE),
    "minm": Persona("minm", PersonaMetric.MEAN_AVAILABLE_MOVES, Direction.MINIMIZE),
}


def persona(kind: str) -> Persona:
    try:
        return PERSONAS[kind.lower()]
    except KeyError:
        raise ConfigError(
            f"unknown persona {kind!r}; expected one of {sorted(PERSONAS)}"
        ) from None


@dataclass(frozen=True)
class Goal:
    """Threshold a simulation outcome must beat (strictly) to count as a win.

    The threshold lives in raw metric units; direction decides the side."""

    threshold: float
    direction: Direction

    def is_win(self, outcome: float) -> bool:
        if self.direction is Direction.MAXIMIZE:
            return outcome > self.threshold
        return outcome < self.threshold


def is_win(outcome: float, goal: Goal) -> bool:
    return goal.is_win(outcome)


def metric_of_trace(trace, metric: PersonaMetric) -> float:
    """Extract a persona metric from any play record carrying
    ``final_score`` and per-move ``avail_counts``."""
    if metric is PersonaMetric.FINAL_SCORE:
        return float(trace.final_score)
    counts = trace.avail_counts
    if not counts:
        return 0.0
    return sum(counts) / len(counts)


def fitness_of(metric_value: float, direction: Direction) -> float:
    """Fitness is always maximized internally; minimizing personas negate."""
    return metric_value if direction is Direction.MAXIMIZE else -metric_value


def raw_of_fitness(fitness: float, direction: Direction) -> float:
    """Inverse of fitness_of: back to human-readable metric units."""
    return fitness if direction is Direction.MAXIMIZE else -fitness
