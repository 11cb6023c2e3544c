"""CNF to d-DNNF compilation and the interchange file formats.

Compilation is exhaustive DPLL: unit propagation, connected-component
decomposition with a component cache, and two-branch decisions that emit
decision or-nodes, so the output is decomposable and deterministic by
construction. Circuits are written and read in the c2d NNF format so external
compilers stay pluggable; CNF input uses DIMACS.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

from . import _kernel
from .logic import (
    FALSE_ID,
    KIND_AND,
    KIND_FALSE,
    KIND_LIT,
    KIND_TRUE,
    TRUE_ID,
    CnfFormula,
    LogicError,
    NnfDag,
    NodeStore,
    Variable,
    anonymous_schema,
    check_decomposability,
)


class NnfFormatError(ValueError):
    """Malformed NNF text: bad header, dangling or forward child reference."""


class DimacsError(ValueError):
    """Malformed DIMACS CNF text."""


@dataclass(frozen=True)
class CompileStats:
    node_count: int
    edge_count: int
    cache_hits: int
    decisions: int
    propagations: int
    wall_time: float

    def as_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "cache_hits": self.cache_hits,
            "decisions": self.decisions,
            "propagations": self.propagations,
            "wall_time": self.wall_time,
        }


def compile_cnf(
    cnf: CnfFormula,
    schema: Optional[tuple[Variable, ...]] = None,
    store: Optional[NodeStore] = None,
    use_cache: bool = True,
) -> tuple[NnfDag, CompileStats]:
    """Compile a CNF into a d-DNNF circuit.

    An unsatisfiable input compiles to the FalseLeaf; a clause-free input to
    the TrueLeaf. The result always passes the decomposability and determinism
    validators.
    """
    if schema is None:
        schema = anonymous_schema(cnf.num_vars)
    if len(schema) != cnf.num_vars:
        raise LogicError(f"schema has {len(schema)} vars, CNF declares {cnf.num_vars}")
    if store is None:
        store = NodeStore()
    t0 = time.perf_counter()
    root, raw = _kernel.compile_kernel(
        store.kinds, store.payloads, store.masks, store._index, cnf.clauses, use_cache
    )
    dag = NnfDag(store, root, schema)
    stats = CompileStats(
        node_count=dag.node_count,
        edge_count=dag.edge_count,
        cache_hits=raw["cache_hits"],
        decisions=raw["decisions"],
        propagations=raw["propagations"],
        wall_time=time.perf_counter() - t0,
    )
    return dag, stats


def choose_decision_variable(clauses: Sequence[Sequence[int]]) -> int:
    """Branching rule: the 1-based variable occurring most often in the
    residual clauses, ties broken by the lowest id. Mirrors the kernel."""
    counts: dict[int, int] = {}
    for cl in clauses:
        for lit in cl:
            v = abs(lit)
            counts[v] = counts.get(v, 0) + 1
    if not counts:
        raise LogicError("no unassigned variable in component")
    best_v, best_n = 0, -1
    for v, n in counts.items():
        if n > best_n or (n == best_n and v < best_v):
            best_v, best_n = v, n
    return best_v


# --- c2d NNF format ---------------------------------------------------------
#
# Header "nnf V E N"; one node per line in topological order:
#   "L l"           literal, signed 1-based
#   "A c i1 .. ic"  and node ("A 0" is the true leaf)
#   "O j c i1 .. ic" or node, j its decision variable or 0 ("O 0 0" is false)


def export_nnf(dag: NnfDag) -> str:
    nodes = dag.nodes()
    pos = {n: i for i, n in enumerate(nodes)}
    store = dag.store
    lines = []
    edges = 0
    for n in nodes:
        k = store.kinds[n]
        if k == KIND_TRUE:
            lines.append("A 0")
        elif k == KIND_FALSE:
            lines.append("O 0 0")
        elif k == KIND_LIT:
            lines.append(f"L {store.payloads[n]}")
        elif k == KIND_AND:
            kids = store.payloads[n]
            edges += len(kids)
            lines.append("A " + " ".join([str(len(kids))] + [str(pos[c]) for c in kids]))
        else:
            kids = store.payloads[n]
            edges += len(kids)
            dv = store.decision_variable(n)
            j = 0 if dv is None else dv + 1
            lines.append(f"O {j} " + " ".join([str(len(kids))] + [str(pos[c]) for c in kids]))
    header = f"nnf {len(nodes)} {edges} {dag.num_vars}"
    return "\n".join([header] + lines) + "\n"


def import_nnf(
    text: str,
    schema: Optional[tuple[Variable, ...]] = None,
    store: Optional[NodeStore] = None,
    validate: bool = True,
) -> NnfDag:
    """Parse c2d NNF text into a circuit; validates decomposability.

    The last node line is the root. Child references must point at earlier
    lines, which also rules out cycles.
    """
    raw_lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in raw_lines if ln and not ln.startswith("c")]
    if not lines:
        raise NnfFormatError("empty NNF text")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "nnf":
        raise NnfFormatError(f"malformed header: {lines[0]!r}")
    try:
        v_decl, e_decl, n_vars = int(head[1]), int(head[2]), int(head[3])
    except ValueError as exc:
        raise NnfFormatError(f"malformed header: {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != v_decl:
        raise NnfFormatError(f"header declares {v_decl} nodes, found {len(body)}")
    if schema is None:
        schema = anonymous_schema(n_vars)
    if len(schema) < n_vars:
        raise NnfFormatError(f"schema has {len(schema)} vars, file declares {n_vars}")
    if store is None:
        store = NodeStore()

    ids: list[int] = []
    edges = 0

    def child(tok: str, line_no: int) -> int:
        try:
            i = int(tok)
        except ValueError as exc:
            raise NnfFormatError(f"bad child index {tok!r} on node line {line_no}") from exc
        if not 0 <= i < line_no:
            raise NnfFormatError(
                f"node line {line_no} references node {i} (dangling or cyclic)"
            )
        return ids[i]

    for line_no, ln in enumerate(body):
        parts = ln.split()
        tag = parts[0]
        if tag == "L":
            if len(parts) != 2:
                raise NnfFormatError(f"malformed literal line: {ln!r}")
            slit = int(parts[1])
            if slit == 0 or abs(slit) > n_vars:
                raise NnfFormatError(f"literal {slit} outside 1..{n_vars}")
            ids.append(store.mk_lit(slit))
        elif tag == "A":
            count = int(parts[1])
            if len(parts) != 2 + count:
                raise NnfFormatError(f"and node arity mismatch: {ln!r}")
            if count == 0:
                ids.append(TRUE_ID)
            else:
                kids = [child(t, line_no) for t in parts[2:]]
                edges += count
                ids.append(store.mk_and(kids))
        elif tag == "O":
            count = int(parts[2])
            if len(parts) != 3 + count:
                raise NnfFormatError(f"or node arity mismatch: {ln!r}")
            if count == 0:
                ids.append(FALSE_ID)
            else:
                kids = [child(t, line_no) for t in parts[3:]]
                edges += count
                ids.append(store.mk_or(kids))
        else:
            raise NnfFormatError(f"unknown node tag {tag!r} in {ln!r}")
    if edges != e_decl:
        raise NnfFormatError(f"header declares {e_decl} edges, found {edges}")
    dag = NnfDag(store, ids[-1], schema)
    if validate:
        res = check_decomposability(dag)
        if not res:
            raise NnfFormatError(f"imported circuit is not decomposable: {res.violation}")
    return dag


# --- DIMACS CNF --------------------------------------------------------------


def read_dimacs(text: str) -> CnfFormula:
    num_vars = None
    num_clauses = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("c"):
            continue
        if ln.startswith("p"):
            parts = ln.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed problem line: {ln!r}")
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise DimacsError("clause before problem line")
        for tok in ln.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                if abs(lit) > num_vars:
                    raise DimacsError(f"literal {lit} exceeds declared {num_vars} vars")
                pending.append(lit)
    if pending:
        raise DimacsError("unterminated clause (missing 0)")
    if num_vars is None:
        raise DimacsError("missing problem line")
    if num_clauses is not None and num_clauses != len(clauses):
        raise DimacsError(f"problem line declares {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, tuple(clauses))


def write_dimacs(cnf: CnfFormula, comment: Optional[str] = None) -> str:
    lines = []
    if comment:
        lines.extend("c " + c for c in comment.splitlines())
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for cl in cnf.clauses:
        lines.append(" ".join(str(l) for l in cl) + " 0")
    return "\n".join(lines) + "\n"
