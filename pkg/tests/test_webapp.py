import time
from pathlib import Path

from fastapi.testclient import TestClient

from src.run_logger import read_steps


def _client():
    from src.web_app import create_app

    return TestClient(create_app())


def _wait_for_run(client, run_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        data = client.get("/api/status", params={"run_id": run_id}).json()
        if data["status"] != "running":
            return data
        time.sleep(0.05)
    raise AssertionError("sweep did not finish in time")


def test_families_endpoint():
    resp = _client().get("/api/families")
    assert resp.status_code == 200
    assert resp.json()["cyclic"] == {"min_m": 3}
    assert resp.json()["simplex-boundary"] == {"min_m": 2}


def test_info_endpoint():
    resp = _client().post("/api/info", json={"m": 4, "facets": [[1, 2], [1, 4], [2, 3]]})
    assert resp.status_code == 200
    data = resp.json()
    assert data["f_vector"] == [1, 4, 3]
    assert data["e_vector"] == [0, -2, 3]
    assert data["minimal_nonfaces"] == [[1, 3], [2, 4], [3, 4]]


def test_rank_endpoint_with_oracle(hlrank_env):
    resp = _client().post("/api/rank", json={"family": "simplex-boundary", "m": 4, "r": 2, "verify": True})
    assert resp.status_code == 200
    data = resp.json()
    assert data["rank"] == 15
    assert data["degrees_of_freedom"] == 1
    assert data["oracle_rank"] == 15
    assert data["oracle_agrees"] is True


def test_rank_endpoint_varying_levels(hlrank_env):
    resp = _client().post("/api/rank", json={"family": "main-effect", "m": 3, "levels": [2, 3, 4]})
    assert resp.status_code == 200
    assert resp.json()["rank"] == 7


def test_evector_endpoint():
    resp = _client().post("/api/evector", json={"family": "cyclic", "m": 5, "r": 2})
    assert resp.status_code == 200
    assert resp.json()["rank"] == 11
    assert _client().post("/api/evector", json={"family": "cyclic", "m": 5, "r": 0}).status_code == 400


def test_bad_requests_return_400(hlrank_env):
    client = _client()
    assert client.post("/api/info", json={"m": 3, "facets": [[1, 2]]}).status_code == 400
    assert client.post("/api/info", json={"m": 3}).status_code == 400
    assert client.post("/api/info", json={"facets": [[1]]}).status_code == 400
    assert client.post("/api/info", json={"m": 3, "family": "tree"}).status_code == 400
    assert client.post("/api/rank", json={"m": 3, "family": "cyclic"}).status_code == 400
    assert client.post("/api/rank", json={"m": 3, "family": "cyclic", "levels": [2, 2]}).status_code == 400
    assert client.post("/api/sweep", params={"mode": "sync"}, json={"max_m": 5}).status_code == 400
    assert client.post("/api/sweep", params={"mode": "sync"}, json={"max_m": 0}).status_code == 400


def test_non_positive_limits_return_400(hlrank_env):
    client = _client()
    model = {"m": 3, "family": "cyclic", "r": 2, "verify": True}
    for limits in ({"size_cap": 0}, {"size_cap": -8}, {"max_entries": 0}):
        resp = client.post("/api/rank", json={**model, **limits})
        assert resp.status_code == 400
        assert "must be a positive integer" in resp.json()["detail"]
        resp = client.post("/api/sweep", params={"mode": "sync"}, json={"max_m": 2, "level_set": [2], **limits})
        assert resp.status_code == 400
    assert client.post("/api/rank", json={**model, "size_cap": 4}).json()["oracle_checked"] is False


def test_sync_sweep_mismatch_returns_500(hlrank_env, monkeypatch):
    import src.web_app as web_app
    from src.model_matrix import RankMismatchError

    def _mismatch(*args, **kwargs):
        raise RankMismatchError("fraction-free rank 3 disagrees with rank 2 mod 2147483647")

    monkeypatch.setattr(web_app, "run_specs", _mismatch)
    resp = _client().post("/api/sweep", params={"mode": "sync"}, json={"max_m": 2, "level_set": [2]})
    assert resp.status_code == 500
    assert "disagrees" in resp.json()["detail"]


def test_sync_sweep(hlrank_env):
    resp = _client().post("/api/sweep", params={"mode": "sync"}, json={"max_m": 3, "level_set": [2, 3]})
    assert resp.status_code == 200
    data = resp.json()
    assert data["cases"] == 72
    assert data["checked"] == 72
    assert data["ok"] is True
    run_dirs = list(hlrank_env.iterdir())
    assert len(run_dirs) == 1
    assert read_steps(run_dirs[0])[-1]["step"] == "sweep_summary"


def test_async_sweep_and_status(hlrank_env):
    client = _client()
    resp = client.post(
        "/api/sweep",
        json={"max_m": 2, "min_m": 1, "level_set": [1, 2], "random_count": 4, "random_m": [3], "seed": 9},
    )
    assert resp.status_code == 200
    run_id = resp.json()["run_id"]
    data = _wait_for_run(client, run_id)
    assert data["status"] == "completed"
    assert data["total"] == 14
    assert data["done"] == 14
    assert data["summary"]["ok"] is True
    assert data["summary"]["seed"] == 9
    steps = read_steps(Path(data["meta"]["output_dir"]))
    assert sum(1 for step in steps if step["step"] == "case") == 14


def test_status_unknown_run():
    resp = _client().get("/api/status", params={"run_id": "missing"})
    assert resp.status_code == 404
