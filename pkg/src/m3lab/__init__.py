"""m3lab: automated playtesting workbench for Match-3 games.

A deterministic rules engine with forward modeling, MCTS agents with
pluggable selection heuristics, genetic programming that evolves those
heuristics into four play personas, an experiment pipeline, and a session
service for collecting human play traces.
"""

__version__ = "0.1.0"
