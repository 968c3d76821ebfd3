import numpy as np
import pytest

from m3lab.engine import BoardConfig, RefillSource, SpawnEvent, new_game


def log_as_tuples(spawn_log):
    """Engine spawn-log entries in the oracle's tuple form."""
    out = []
    for ev in spawn_log:
        if isinstance(ev, SpawnEvent):
            out.append(("s", ev.cell[0], ev.cell[1], ev.color))
        else:
            out.append(("r", list(ev.grid)))
    return out


def grid_from_rows(rows):
    return np.array(rows, dtype=np.int8)


@pytest.fixture
def default_config():
    return BoardConfig()


@pytest.fixture
def seeded_game():
    def make(seed=42, **cfg):
        config = BoardConfig(**cfg)
        return new_game(config, RefillSource.seeded(seed, config.width))

    return make
