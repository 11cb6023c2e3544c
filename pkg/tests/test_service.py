"""HTTP service endpoints against the query engine, golden-style parity."""
import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from policylens.cli import main
from policylens.query import Theory, action_likelihood, state_likelihood
from policylens.service import create_app


@pytest.fixture(scope="module")
def theory_dir(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("theories")
    assert main(["demo", "--out", str(tmp)]) == 0
    assert main(
        ["compile", "--traces", str(tmp / "carkey.jsonl"), "--out", str(tmp / "carkey.nnf")]
    ) == 0
    return tmp


@pytest.fixture(scope="module")
def client(theory_dir):
    return TestClient(create_app(theory_dir))


def test_empty_service_lists_nothing(tmp_path):
    empty = TestClient(create_app(tmp_path))
    assert empty.get("/theories").json() == []


def test_list_theories(client, theory_dir):
    body = client.get("/theories").json()
    assert len(body) == 1
    entry = body[0]
    assert entry["id"] == "carkey"
    assert entry["model_count"] == "3"
    theory = Theory.load(theory_dir / "carkey.nnf")
    assert entry["node_count"] == theory.dag.node_count
    assert entry["schema"]["actions"] == ["drive", "switch_to_drive_mode", "insert_key"]


def test_ids_stable_across_restarts(theory_dir):
    ids1 = [t["id"] for t in TestClient(create_app(theory_dir)).get("/theories").json()]
    ids2 = [t["id"] for t in TestClient(create_app(theory_dir)).get("/theories").json()]
    assert ids1 == ids2


def test_query_matches_engine_bit_for_bit(client, theory_dir):
    theory = Theory.load(theory_dir / "carkey.nnf")
    body = client.post(
        "/theories/carkey/query",
        json={"evidence": {"Key_inside_car": True}, "target": "actions"},
    ).json()
    engine = action_likelihood(theory, {"Key_inside_car": True}).as_dict()
    assert body == engine

    body = client.post(
        "/theories/carkey/query",
        json={"evidence": {}, "target": "state", "action": "drive"},
    ).json()
    engine = state_likelihood(theory, "drive").as_dict()
    assert body == engine


def test_unconditioned_distribution_sums_to_one(client):
    body = client.post("/theories/carkey/query", json={"evidence": {}}).json()
    total = sum(
        int(v["num"]) / int(v["den"]) for v in body["likelihoods"].values()
    )
    assert abs(total - 1) < 1e-12


def test_complete_state_pins_action(client):
    body = client.post(
        "/theories/carkey/query",
        json={"evidence": {"Drive_mode_on": True, "Key_inside_car": True}},
    ).json()
    assert body["likelihoods"]["drive"]["p"] == "1.000"


def test_404_unknown_theory(client):
    assert client.post("/theories/nope/query", json={"evidence": {}}).status_code == 404


def test_422_unknown_variable(client):
    r = client.post("/theories/carkey/query", json={"evidence": {"Bogus": True}})
    assert r.status_code == 422


def test_409_no_supporting_observations(client):
    r = client.post(
        "/theories/carkey/query",
        json={"evidence": {"Drive_mode_on": True, "Key_inside_car": False}},
    )
    assert r.status_code == 409


def test_dag_endpoint_full_and_conditioned(client):
    full = client.post("/theories/carkey/dag", json={"evidence": {}}).json()
    assert full["nodes"][full["root"]]["kind"] in ("or", "and")
    kinds = {n["kind"] for n in full["nodes"]}
    assert "literal" in kinds
    # children referenced in topological order
    for node in full["nodes"]:
        for c in node.get("children", []):
            assert c < node["id"]

    conditioned = client.post(
        "/theories/carkey/dag", json={"evidence": {"Key_inside_car": True}}
    ).json()
    assert len(conditioned["nodes"]) < len(full["nodes"])  # branch pruned

    def positive_literals(dag):
        return {
            n["literal"]["name"]
            for n in dag["nodes"]
            if n["kind"] == "literal" and n["literal"]["positive"]
        }

    # the ~K branch (the only place insert_key is asserted) is gone
    assert "action=insert_key" in positive_literals(full)
    assert "action=insert_key" not in positive_literals(conditioned)


def test_dag_contradictory_evidence_single_false_leaf(client):
    body = client.post(
        "/theories/carkey/dag",
        json={"evidence": {"Drive_mode_on": True, "Key_inside_car": False}},
    ).json()
    assert body["nodes"] == [{"id": 0, "kind": "false"}]


def test_413_node_cap(theory_dir):
    tiny = TestClient(create_app(theory_dir, node_cap=2))
    r = tiny.post("/theories/carkey/dag", json={"evidence": {}})
    assert r.status_code == 413


def test_concurrent_identical_requests_agree(client):
    payload = {"evidence": {"Key_inside_car": True}, "target": "actions"}
    bodies = {
        json.dumps(client.post("/theories/carkey/query", json=payload).json(), sort_keys=True)
        for _ in range(8)
    }
    assert len(bodies) == 1
