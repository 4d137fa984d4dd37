import pytest
from fastapi.testclient import TestClient

from gridfill.svc import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


FALLBACK_ROWS = [
    ["2016-11-01", "A", "?", "?"],
    ["2016-11-02", "B", "12", "?"],
    ["2016-11-03", "A", "?", "200"],
    ["2016-11-04", "C", "18", "400"],
    ["2016-11-05", "B", "10", "?"],
    ["2016-11-06", "B", "?", "800"],
    ["2016-11-07", "C", "?", "1000"],
]

FALLBACK_REQUEST = {
    "table": {"rows": FALLBACK_ROWS},
    "sketch": "?1",
    "examples": {"1": [
        {"in": [3, 3], "out": [[2, 3]]},
        {"in": [7, 3], "out": [[5, 3]]},
        {"in": [1, 4], "out": [[3, 4]]},
    ]},
    "config": {"max_conj": 1, "depth": 1, "enable_filter": False},
}

FALLBACK_FILLS = {
    (1, 3): "12", (3, 3): "12", (6, 3): "10", (7, 3): "10",
    (1, 4): "200", (2, 4): "200", (5, 4): "400",
}


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


def test_synthesize_fallback_table(client):
    r = client.post("/api/synthesize", json=FALLBACK_REQUEST)
    assert r.status_code == 200
    body = r.json()
    assert body["holes"]["1"]["branches"] == 2
    fills = {tuple(f["cell"]): f.get("value") for f in body["fills"]}
    assert fills == {cell: value for cell, value in FALLBACK_FILLS.items()}
    assert body["timing_ms"] >= 0


def test_unknown_function_422(client):
    r = client.post("/api/synthesize", json={
        "table": {"rows": [["1", "?"]]},
        "sketch": "FROB(?1)",
        "examples": {"1": [{"in": [1, 2], "out": [[1, 1]]}]},
    })
    assert r.status_code == 422
    assert "UnknownFunction" in str(r.json()["detail"])


def test_malformed_table_422(client):
    r = client.post("/api/synthesize", json={
        "table": {"rows": [["1", "2"], ["3"]]},
        "sketch": "?1",
        "examples": {"1": [{"in": [1, 2], "out": [[1, 1]]}]},
    })
    assert r.status_code == 422


def test_apply_round_trips_synthesized_program(client):
    synth = client.post("/api/synthesize", json=FALLBACK_REQUEST).json()
    program = synth["holes"]["1"]["program"]
    r = client.post("/api/apply", json={
        "table": {"rows": FALLBACK_ROWS},
        "sketch": "?1",
        "programs": {"1": program},
    })
    assert r.status_code == 200
    assert r.json()["fills"] == synth["fills"]


def test_apply_depth_cap_422(client):
    deep = "x"
    for _ in range(5):
        deep = f"GetCell({deep}, u, 1, \\y.\\z. True)"
    r = client.post("/api/apply", json={
        "table": {"rows": [["1", "?"]]},
        "sketch": "?1",
        "programs": {"1": deep},
    })
    assert r.status_code == 422


def test_timeout_408(client):
    request = dict(FALLBACK_REQUEST)
    request["config"] = {"max_conj": 1, "timeout_s": 1e-9}
    r = client.post("/api/synthesize", json=request)
    assert r.status_code == 408
    assert r.json()["detail"]["holes"]["1"] == "timeout"


def test_oversized_table_413(client):
    rows = [["x" * 100] * 100 for _ in range(101)]
    r = client.post("/api/synthesize", json={
        "table": {"rows": rows},
        "sketch": "?1",
        "examples": {"1": [{"in": [1, 1], "out": [[1, 2]]}]},
    })
    assert r.status_code == 413


def test_statelessness_identical_bodies(client):
    a = client.post("/api/synthesize", json=FALLBACK_REQUEST).json()
    b = client.post("/api/synthesize", json=FALLBACK_REQUEST).json()
    a.pop("timing_ms"), b.pop("timing_ms")
    assert a == b


def test_no_program_422_with_detail(client):
    r = client.post("/api/synthesize", json={
        "table": {"rows": [["?", "1", "?", "2", "?"]]},
        "sketch": "?1",
        "examples": {"1": [
            {"in": [1, 2], "out": [[1, 4]]},
            {"in": [1, 4], "out": [[1, 2]]},
            {"in": [1, 1], "out": None},
            {"in": [1, 3], "out": None},
            {"in": [1, 5], "out": None},
        ]},
        "config": {"depth": 1, "enable_filter": False},
    })
    assert r.status_code == 422
    assert r.json()["detail"]["holes"]["1"] == "no program"
