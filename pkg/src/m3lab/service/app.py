"""HTTP interface for live study sessions and study reporting.

Errors surface as machine-readable tokens: 400 input_error / config_error,
404 not_found, 409 state_error / run_error.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..engine import load_preset_dir
from ..engine.errors import ConfigError, InputError, M3Error, StateError
from ..search import SearchConfig
from .comparison import RunError, compare_with_agents
from .sessions import NotFoundError, SessionManager
from .store import TraceStore, summarize_study


@dataclass
class ServiceSettings:
    presets_dir: Path | str
    store_dir: Path | str
    genomes_dir: Path | str | None = None
    moves_per_game: int = 20
    session_seed: int | None = None
    comparison_root_visits: int = 60
    comparison_repeats: int = 1
    comparison_master_seed: int = 7
    static_dir: Path | str | None = None


class CreateSessionBody(BaseModel):
    participant: str = Field(min_length=1, max_length=200)
    metadata: dict = Field(default_factory=dict)


class MoveBody(BaseModel):
    a: list[int] = Field(min_length=2, max_length=2)
    b: list[int] = Field(min_length=2, max_length=2)


_ERROR_TOKENS = [
    (NotFoundError, 404, "not_found"),
    (RunError, 409, "run_error"),
    (InputError, 400, "input_error"),
    (StateError, 409, "state_error"),
    (ConfigError, 400, "config_error"),
    (M3Error, 500, "engine_fault"),
]


def _error_response(exc: Exception):
    for cls, status, token in _ERROR_TOKENS:
        if isinstance(exc, cls):
            return JSONResponse(
                status_code=status, content={"error": token, "detail": str(exc)}
            )
    raise exc


def create_app(settings: ServiceSettings) -> FastAPI:
    presets = load_preset_dir(settings.presets_dir)
    store = TraceStore(settings.store_dir)
    manager = SessionManager(
        presets,
        store,
        moves_per_game=settings.moves_per_game,
        rng_seed=settings.session_seed,
    )
    app = FastAPI(title="m3lab study service")
    app.state.manager = manager
    app.state.store = store
    app.state.settings = settings

    @app.exception_handler(M3Error)
    async def handle_m3_error(_request: Request, exc: M3Error):
        return _error_response(exc)

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        session = manager.create_session(body.participant, body.metadata)
        return {
            "session_id": session.id,
            "state": manager.public_state(session.id),
        }

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return manager.public_state(session_id)

    @app.post("/sessions/{session_id}/moves")
    def submit_move(session_id: str, body: MoveBody):
        return manager.submit_move(session_id, body.a, body.b)

    @app.get("/sessions/{session_id}/traces")
    def get_traces(session_id: str):
        return {"traces": manager.traces(session_id)}

    @app.get("/presets")
    def get_presets():
        return {
            "presets": [
                {
                    "id": p.id,
                    "width": p.width,
                    "height": p.height,
                    "num_colors": p.num_colors,
                }
                for p in presets
            ]
        }

    @app.get("/study/summary")
    def study_summary():
        return summarize_study(store).to_json()

    @app.get("/study/comparison")
    def study_comparison():
        return compare_with_agents(
            store,
            presets,
            genomes_dir=settings.genomes_dir,
            search=SearchConfig(
                root_visits=settings.comparison_root_visits,
                rollout_base=settings.moves_per_game,
            ),
            moves_per_game=settings.moves_per_game,
            repeats=settings.comparison_repeats,
            master_seed=settings.comparison_master_seed,
        )

    if settings.static_dir:
        from fastapi.staticfiles import StaticFiles

        # mounted last so the API routes above keep precedence; html=True
        # serves index.html at / with its relative dist/ and src/ assets
        app.mount(
            "/",
            StaticFiles(directory=Path(settings.static_dir), html=True),
            name="client",
        )

    return app
