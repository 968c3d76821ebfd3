"""Session service: live human play over HTTP, trace store, study reports."""

from .app import ServiceSettings, create_app
from .comparison import RunError, compare_with_agents
from .sessions import NotFoundError, RoundSpec, Session, SessionManager
from .store import TraceStore, replay_trace, summarize_study

__all__ = [
    "NotFoundError",
    "RoundSpec",
    "RunError",
    "ServiceSettings",
    "Session",
    "SessionManager",
    "TraceStore",
    "compare_with_agents",
    "create_app",
    "replay_trace",
    "summarize_study",
]
