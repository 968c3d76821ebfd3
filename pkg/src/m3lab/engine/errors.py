"""Exception hierarchy shared across the workbench."""


class M3Error(Exception):
    """Base for all workbench errors."""


class ConfigError(M3Error):
    """Invalid configuration, preset file, or scripted board."""


class InputError(M3Error):
    """Malformed caller input (bad coordinates, non-adjacent swap)."""


class StateError(M3Error):
    """Operation not allowed in the current state (game over, closed session)."""


class EngineFault(M3Error):
    """Defensive internal bound exceeded; indicates a bug, never expected."""
