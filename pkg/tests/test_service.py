from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from perfgen.service import create_app

CORPUS_DIR = str(Path(__file__).resolve().parents[1] / "corpus" / "mini")
REPLAY_DIR = str(Path(CORPUS_DIR) / "replay")

FAST = dict(timing_repeats=1, timing_passes=1, eval_repeats=1)


@pytest.fixture(scope="module")
def client() -> TestClient:
    return TestClient(create_app())


class TestHealthAndValidate:
    def test_health(self, client):
        data = client.get("/health").json()
        assert data["status"] == "ok"

    def test_validate_flags_bad_task(self, client):
        payload = {"task": {"task_id": "x", "description": "d", "entry_point": ""}}
        data = client.post("/tasks/validate", json=payload).json()
        assert data["violations"] == ["entry_point empty"]

    def test_validate_ok_task(self, client):
        payload = {"task": {"task_id": "x", "description": "d", "entry_point": "f"}}
        assert client.post("/tasks/validate", json=payload).json()["violations"] == []


class TestPipelineRun:
    def test_single_task_replay(self, client, tmp_path):
        payload = {
            "corpus_dir": CORPUS_DIR,
            "task_id": "balanced_brackets",
            "provider": "replay",
            "replay_dir": REPLAY_DIR,
            "report_dir": str(tmp_path),
            **FAST,
        }
        data = client.post("/pipeline/run", json=payload).json()
        record = data["record"]
        assert record["failure"] is None
        assert record["final_candidate_id"] == 1
        assert (tmp_path / "runs" / record["run_id"] / "record.json").is_file()

    def test_unknown_task_404(self, client):
        payload = {
            "corpus_dir": CORPUS_DIR,
            "task_id": "nope",
            "provider": "replay",
            "replay_dir": REPLAY_DIR,
        }
        assert client.post("/pipeline/run", json=payload).status_code == 404

    def test_bad_corpus_400(self, client):
        payload = {"corpus_dir": "/nonexistent", "task_id": "x",
                   "provider": "replay", "replay_dir": REPLAY_DIR}
        assert client.post("/pipeline/run", json=payload).status_code == 400

    def test_missing_store_400(self, client):
        payload = {"corpus_dir": CORPUS_DIR, "task_id": "prime_fib",
                   "provider": "replay", "replay_dir": None}
        assert client.post("/pipeline/run", json=payload).status_code == 400


class TestReplayStoreVerify:
    def test_shipped_store_ok(self, client):
        data = client.post("/replay-store/verify", json={"replay_dir": REPLAY_DIR}).json()
        assert data["ok"] is True
        assert data["entries"] > 0

    def test_empty_dir_reports_issues(self, client, tmp_path):
        data = client.post(
            "/replay-store/verify", json={"replay_dir": str(tmp_path)}
        ).json()
        assert data["ok"] is False


class TestEvalEndpoint:
    def test_missing_solution_400(self, client, tmp_path):
        (tmp_path / "solutions").mkdir()
        payload = {
            "corpus_dir": CORPUS_DIR,
            "solutions_dir": str(tmp_path / "solutions"),
            **FAST,
        }
        response = client.post("/eval", json=payload)
        assert response.status_code == 400
        assert "no solution file" in response.json()["detail"]
