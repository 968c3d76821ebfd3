import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from m3lab.engine import legal_moves
from m3lab.engine.presets import make_sample_presets
from m3lab.service import ServiceSettings, create_app
from m3lab.service.store import replay_trace

PUBLIC_STATE_KEYS = {
    "session_id",
    "round_index",
    "rounds_total",
    "session_complete",
    "board",
    "num_colors",
    "score",
    "moves_made",
    "moves_remaining",
    "round_scores",
}
CLOSED_STATE_KEYS = {
    "session_id",
    "round_index",
    "rounds_total",
    "session_complete",
    "round_scores",
    "total_score",
}


@pytest.fixture()
def service(tmp_path):
    presets_dir = tmp_path / "presets"
    make_sample_presets(presets_dir, count=3, seed=17)
    settings = ServiceSettings(
        presets_dir=presets_dir,
        store_dir=tmp_path / "store",
        moves_per_game=4,  # short rounds keep protocol tests fast
        session_seed=1234,
        comparison_root_visits=2,
        comparison_master_seed=5,
    )
    app = create_app(settings)
    return TestClient(app), settings


def find_valid_move(client, session_id, board):
    grid = np.array(board, dtype=np.int8)
    move = legal_moves(grid)[0]
    return {"a": list(move.a), "b": list(move.b)}


def find_invalid_move(board):
    # swapping two equal adjacent colors never produces a match
    grid = np.array(board)
    h, w = grid.shape
    for r in range(h):
        for c in range(w - 1):
            if grid[r, c] == grid[r, c + 1]:
                return {"a": [r, c], "b": [r, c + 1]}
    raise AssertionError("no equal-color adjacent pair on board")


def play_round(client, session_id):
    """Play one full round with engine-computed valid moves."""
    state = client.get(f"/sessions/{session_id}").json()
    while True:
        body = find_valid_move(client, session_id, state["board"])
        reply = client.post(f"/sessions/{session_id}/moves", json=body)
        assert reply.status_code == 200
        data = reply.json()
        assert data["valid"] is True
        state = data["state"]
        if data["round_completed"]:
            return state


class TestSessionLifecycle:
    def test_create_session_initial_state(self, service):
        client, _ = service
        reply = client.post("/sessions", json={"participant": "p1"})
        assert reply.status_code == 201
        data = reply.json()
        state = data["state"]
        assert set(state) == PUBLIC_STATE_KEYS
        assert state["round_index"] == 1
        assert state["rounds_total"] == 6
        assert state["score"] == 0
        assert state["moves_remaining"] == 4
        assert len(state["board"]) == 7 and len(state["board"][0]) == 7

    def test_round_plan_has_three_presets_and_three_seeds(self, service):
        client, settings = service
        reply = client.post("/sessions", json={"participant": "p2"})
        session_id = reply.json()["session_id"]
        store_file = (settings.store_dir / f"{session_id}.jsonl").read_text()
        header = json.loads(store_file.splitlines()[0])
        plan = header["round_plan"]
        assert len(plan) == 6
        kinds = [spec["kind"] for spec in plan]
        assert kinds.count("preset") == 3
        assert kinds.count("seed") == 3
        assert len({spec["preset_id"] for spec in plan if spec["kind"] == "preset"}) == 3

    def test_empty_participant_rejected(self, service):
        client, _ = service
        reply = client.post("/sessions", json={"participant": "   "})
        assert reply.status_code == 400
        assert reply.json()["error"] == "input_error"

    def test_unknown_session_is_404(self, service):
        client, _ = service
        reply = client.get("/sessions/nope")
        assert reply.status_code == 404
        assert reply.json()["error"] == "not_found"


class TestMoves:
    def test_invalid_swap_consumes_nothing(self, service):
        client, _ = service
        state = client.post("/sessions", json={"participant": "p"}).json()["state"]
        sid = state["session_id"]
        body = find_invalid_move(state["board"])
        reply = client.post(f"/sessions/{sid}/moves", json=body)
        assert reply.status_code == 200
        data = reply.json()
        assert data["valid"] is False
        assert data["points_gained"] == 0
        assert data["steps"] == []
        assert data["state"]["moves_remaining"] == 4
        assert data["state"]["board"] == state["board"]

    def test_valid_move_scores_and_animates(self, service):
        client, _ = service
        state = client.post("/sessions", json={"participant": "p"}).json()["state"]
        sid = state["session_id"]
        body = find_valid_move(client, sid, state["board"])
        data = client.post(f"/sessions/{sid}/moves", json=body).json()
        assert data["valid"] is True
        assert data["points_gained"] >= 60
        assert len(data["steps"]) >= 1
        step = data["steps"][0]
        assert step["multiplier"] == 1
        assert step["points"] >= 60
        assert step["groups"] and step["groups"][0]["cells"]
        assert len(step["grid_after"]) == 7
        # the last step's board matches the live board unless a reshuffle hit
        if not data["reshuffled"]:
            assert data["steps"][-1]["grid_after"] == data["state"]["board"]
        assert data["state"]["score"] == data["points_gained"]
        assert data["state"]["moves_remaining"] == 3

    def test_non_adjacent_move_is_input_error(self, service):
        client, _ = service
        state = client.post("/sessions", json={"participant": "p"}).json()["state"]
        sid = state["session_id"]
        reply = client.post(f"/sessions/{sid}/moves", json={"a": [0, 0], "b": [2, 0]})
        assert reply.status_code == 400
        assert reply.json()["error"] == "input_error"

    def test_out_of_bounds_move_is_input_error(self, service):
        client, _ = service
        state = client.post("/sessions", json={"participant": "p"}).json()["state"]
        sid = state["session_id"]
        reply = client.post(f"/sessions/{sid}/moves", json={"a": [6, 6], "b": [6, 7]})
        assert reply.status_code == 400


class TestFullProtocol:
    def test_six_rounds_close_the_session(self, service):
        client, settings = service
        created = client.post("/sessions", json={"participant": "marathon"}).json()
        sid = created["session_id"]

        # traces are unavailable while the session is open
        reply = client.get(f"/sessions/{sid}/traces")
        assert reply.status_code == 409

        for round_no in range(6):
            state = play_round(client, sid)
        assert state["session_complete"] is True
        assert set(state) == CLOSED_STATE_KEYS
        assert len(state["round_scores"]) == 6
        assert state["total_score"] == sum(state["round_scores"])
        assert all(s >= 4 * 60 for s in state["round_scores"])

        # a move after closing is a state error
        reply = client.post(f"/sessions/{sid}/moves", json={"a": [0, 0], "b": [0, 1]})
        assert reply.status_code == 409
        assert reply.json()["error"] == "state_error"

        traces = client.get(f"/sessions/{sid}/traces").json()["traces"]
        assert len(traces) == 6
        for trace in traces:
            assert trace["schema"] == "m3-trace/1"
            valid_moves = [m for m in trace["moves"] if m["valid"]]
            assert len(valid_moves) == 4
            assert replay_trace(trace) == trace["final_score"]
            assert len(trace["timestamps"]) == len(trace["moves"])

    def test_invalid_attempts_are_recorded_but_free(self, service):
        client, _ = service
        state = client.post("/sessions", json={"participant": "p"}).json()["state"]
        sid = state["session_id"]
        bad = find_invalid_move(state["board"])
        client.post(f"/sessions/{sid}/moves", json=bad)
        for _ in range(6):
            state = play_round(client, sid)
            if state["session_complete"]:
                break
        traces = client.get(f"/sessions/{sid}/traces").json()["traces"]
        first = traces[0]
        assert any(not m["valid"] for m in first["moves"])
        assert sum(1 for m in first["moves"] if m["valid"]) == 4


class TestStudyEndpoints:
    def complete_session(self, client, name):
        sid = client.post("/sessions", json={"participant": name}).json()["session_id"]
        for _ in range(6):
            state = play_round(client, sid)
        return sid, state

    def test_presets_endpoint_hides_queues(self, service):
        client, _ = service
        data = client.get("/presets").json()
        assert len(data["presets"]) == 3
        for p in data["presets"]:
            assert set(p) == {"id", "width", "height", "num_colors"}

    def test_summary_shape(self, service):
        client, _ = service
        self.complete_session(client, "u1")
        self.complete_session(client, "u2")
        summary = client.get("/study/summary").json()
        assert summary["rows"] == ["average", "maximum", "minimum"]
        assert summary["sessions"] == 2
        assert len(summary["boards"]) == 3
        for stats in summary["boards"].values():
            assert stats["minimum"] <= stats["average"] <= stats["maximum"]
        random_avg = summary["random_average"]
        assert random_avg["minimum"] <= random_avg["average"] <= random_avg["maximum"]

    def test_empty_store_summary(self, service):
        client, _ = service
        summary = client.get("/study/summary").json()
        assert summary["sessions"] == 0
        assert summary["boards"] == {}
        assert summary["random_average"] is None

    def test_comparison_without_genomes_is_run_error(self, service):
        client, _ = service
        reply = client.get("/study/comparison")
        assert reply.status_code == 409
        assert reply.json()["error"] == "run_error"


class TestStaticClient:
    def test_root_serves_client_without_shadowing_api(self, tmp_path):
        presets_dir = tmp_path / "presets"
        make_sample_presets(presets_dir, count=3, seed=17)
        static = tmp_path / "client"
        static.mkdir()
        (static / "index.html").write_text("<html><body>play</body></html>")
        settings = ServiceSettings(
            presets_dir=presets_dir,
            store_dir=tmp_path / "store",
            moves_per_game=4,
            static_dir=static,
        )
        client = TestClient(create_app(settings))
        assert "play" in client.get("/").text
        assert client.get("/presets").status_code == 200
        assert client.post("/sessions", json={"participant": "x"}).status_code == 201


class TestComparison:
    def test_agents_and_flags(self, tmp_path):
        presets_dir = tmp_path / "presets"
        make_sample_presets(presets_dir, count=3, seed=17)
        genomes_dir = tmp_path / "genomes"
        genomes_dir.mkdir()
        for kind, genome in [
            ("maxs", "div(child_wins, child_visits)"),
            ("mins", "div(1.0, add(child_wins, 1.0))"),
            ("maxm", "child_available_moves"),
            ("minm", "div(1.0, add(child_available_moves, 1.0))"),
        ]:
            (genomes_dir / f"{kind}").mkdir()
            (genomes_dir / kind / "best_genome.json").write_text(
                json.dumps({"schema": "m3-genome/1", "persona": kind, "genome": genome})
            )
        settings = ServiceSettings(
            presets_dir=presets_dir,
            store_dir=tmp_path / "store",
            genomes_dir=genomes_dir,
            moves_per_game=3,
            session_seed=9,
            comparison_root_visits=2,
            comparison_master_seed=5,
        )
        client = TestClient(create_app(settings))

        # agent-only report before any human plays
        report = client.get("/study/comparison").json()
        assert len(report["boards"]) == 3
        for row in report["boards"]:
            assert set(row["agents"]) == {"maxs", "mins", "maxm", "minm", "vanilla", "random"}
            assert "flags" not in row

        # after one human session, flags appear
        sid = client.post("/sessions", json={"participant": "h"}).json()["session_id"]
        for _ in range(6):
            state = play_round(client, sid)
        report = client.get("/study/comparison").json()
        flagged = [row for row in report["boards"] if "flags" in row]
        assert len(flagged) == 3
        for row in flagged:
            assert set(row["flags"]) == {"mins_below_human_min", "maxs_at_or_above_human_max"}
            assert row["human"]["minimum"] <= row["human"]["maximum"]
