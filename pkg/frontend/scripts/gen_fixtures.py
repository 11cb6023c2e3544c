"""Regenerate the UI test fixtures from the real service.

Builds the car-key demo theory plus a small trained traffic agent, runs the
HTTP service in-process, and captures responses for 20 scripted toggle
configurations (including the "vehicle only on east-straight, east-left
unknown, rest empty" query). Run from the repo root:

    python frontend/scripts/gen_fixtures.py
"""
import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from policylens.cli import main as cli_main
from policylens.qlearn import TrainConfig, train, policy_fn
from policylens.query import Theory
from policylens.service import create_app
from policylens.tlc import collect_traces
from policylens.traces import read_traces

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def build_theories(tmp: Path) -> None:
    assert cli_main(["demo", "--out", str(tmp)]) == 0
    assert cli_main(
        ["compile", "--traces", str(tmp / "carkey.jsonl"), "--out", str(tmp / "carkey.nnf")]
    ) == 0

    cfg = TrainConfig(episodes=30)
    result = train(cfg, seed=0)
    traces, _ = collect_traces(cfg.env, policy_fn(result.policy), depth=1,
                               episodes=30, seed=1000)
    theory, _ = Theory.from_traces(traces)
    theory.save(tmp / "agent1.nnf")


def scripted_configs(client: TestClient) -> list[dict]:
    agent_vars = json.loads(
        client.get("/theories").content
    )
    agent_schema = next(t for t in agent_vars if t["id"] == "agent1")["schema"]
    state_vars = agent_schema["state_variables"]

    configs = []

    # east-straight present, east-left unknown, rest empty
    east_only = {n: False for n in state_vars if n not in ("E-G0_0-7", "E-G1_0-7")}
    east_only["E-G0_0-7"] = True
    configs.append({"theory": "agent1", "body": {"evidence": east_only, "target": "actions"}})

    configs.append({"theory": "agent1", "body": {"evidence": {}, "target": "actions"}})
    configs.append(
        {"theory": "agent1", "body": {"evidence": {"E-G0_0-7": True}, "target": "actions"}}
    )
    for var in state_vars[:4]:
        configs.append(
            {"theory": "agent1", "body": {"evidence": {var: True}, "target": "actions"}}
        )
        configs.append(
            {"theory": "agent1", "body": {"evidence": {var: False}, "target": "actions"}}
        )
    for action in agent_schema["actions"]:
        configs.append(
            {"theory": "agent1", "body": {"evidence": {}, "target": "state", "action": action}}
        )

    # car-key demo: unconditioned, K toggled each way, complete states
    for evidence in (
        {},
        {"Key_inside_car": True},
        {"Key_inside_car": False},
        {"Key_inside_car": True, "Drive_mode_on": True},
        {"Key_inside_car": True, "Drive_mode_on": False},
    ):
        configs.append({"theory": "carkey", "body": {"evidence": evidence, "target": "actions"}})

    return configs[:20]


def main() -> int:
    tmp = FIXTURES / "_theories"
    tmp.mkdir(parents=True, exist_ok=True)
    build_theories(tmp)
    client = TestClient(create_app(tmp))

    queries = []
    for config in scripted_configs(client):
        res = client.post(f"/theories/{config['theory']}/query", json=config["body"])
        entry = dict(config)
        entry["status"] = res.status_code
        entry["response"] = res.json()
        queries.append(entry)
    (FIXTURES / "queries.json").write_text(json.dumps(queries, indent=2) + "\n")

    dags = {}
    for name, evidence in (
        ("carkey_full", {}),
        ("carkey_key_true", {"Key_inside_car": True}),
        ("carkey_contradiction", {"Key_inside_car": False, "Drive_mode_on": True}),
    ):
        res = client.post("/theories/carkey/dag", json={"evidence": evidence})
        dags[name] = {"evidence": evidence, "status": res.status_code, "response": res.json()}
    (FIXTURES / "dags.json").write_text(json.dumps(dags, indent=2) + "\n")

    for leftover in tmp.iterdir():
        leftover.unlink()
    tmp.rmdir()
    print(f"wrote {FIXTURES / 'queries.json'} ({len(queries)} configs) and dags.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
