"""HTTP service for interactive conditioning queries over compiled theories.

Theories load once at startup from a directory of .nnf files with schema
sidecars; every request is read-only over the immutable circuits, so
arbitrary concurrency is safe and responses for identical requests are
identical. Conditioning state lives entirely in the client: each query ships
the whole evidence map.
"""
from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .logic import KIND_AND, KIND_LIT, KIND_OR, KIND_TRUE, NnfDag
from .query import (
    QueryError,
    Theory,
    ZeroCountEvidence,
    action_likelihood,
    condition,
    state_likelihood,
)

DEFAULT_NODE_CAP = 2000


class QueryBody(BaseModel):
    evidence: dict[str, bool] = Field(default_factory=dict)
    target: Literal["actions", "state"] = "actions"
    action: Optional[str] = None  # required by target "state": which action


class DagBody(BaseModel):
    evidence: dict[str, bool] = Field(default_factory=dict)


def dag_json(dag: NnfDag, node_cap: int) -> dict:
    """Topologically ordered node list of the (conditioned) circuit."""
    nodes = dag.nodes()
    if len(nodes) > node_cap:
        raise HTTPException(
            status_code=413,
            detail=f"conditioned circuit has {len(nodes)} nodes (cap {node_cap})",
        )
    store = dag.store
    pos = {n: i for i, n in enumerate(nodes)}
    out = []
    for n in nodes:
        k = store.kinds[n]
        if k == KIND_AND or k == KIND_OR:
            out.append(
                {
                    "id": pos[n],
                    "kind": "and" if k == KIND_AND else "or",
                    "children": [pos[c] for c in store.payloads[n]],
                }
            )
        elif k == KIND_LIT:
            slit = store.payloads[n]
            out.append(
                {
                    "id": pos[n],
                    "kind": "literal",
                    "literal": {
                        "name": dag.schema[abs(slit) - 1].name,
                        "positive": slit > 0,
                    },
                }
            )
        else:
            out.append({"id": pos[n], "kind": "true" if k == KIND_TRUE else "false"})
    return {"nodes": out, "root": pos[dag.root]}


def load_theories(theory_dir: Path) -> dict[str, Theory]:
    theories = {}
    for path in sorted(Path(theory_dir).glob("*.nnf")):
        theories[path.stem] = Theory.load(path)
    return theories


def create_app(
    theory_dir: Path,
    node_cap: int = DEFAULT_NODE_CAP,
    ui_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="policylens", version="0.1.0")
    theories = load_theories(theory_dir)

    def get_theory(theory_id: str) -> Theory:
        theory = theories.get(theory_id)
        if theory is None:
            raise HTTPException(status_code=404, detail=f"unknown theory {theory_id!r}")
        return theory

    @app.get("/theories")
    def list_theories() -> list[dict]:
        return [
            {
                "id": tid,
                "schema": t.schema.as_dict(),
                "model_count": str(t.model_count()),
                "node_count": t.dag.node_count,
            }
            for tid, t in sorted(theories.items())
        ]

    @app.post("/theories/{theory_id}/query")
    def query_theory(theory_id: str, body: QueryBody) -> dict:
        theory = get_theory(theory_id)
        try:
            if body.target == "actions":
                result = action_likelihood(theory, body.evidence)
            else:
                if body.action is None:
                    raise HTTPException(
                        status_code=422, detail='target "state" needs an action'
                    )
                result = state_likelihood(theory, body.action, body.evidence)
        except ZeroCountEvidence as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except QueryError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return result.as_dict()

    @app.post("/theories/{theory_id}/dag")
    def conditioned_dag(theory_id: str, body: DagBody) -> dict:
        theory = get_theory(theory_id)
        try:
            conditioned = condition(theory.dag, body.evidence)
        except QueryError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return dag_json(conditioned, node_cap)

    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
