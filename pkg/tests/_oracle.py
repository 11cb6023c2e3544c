"""Brute-force truth-table oracles, independent of the counting kernels.

A formula's model set over n variables is a 2^n-bit integer: bit a is set iff
assignment a (variable v true iff bit v of a is set) satisfies the formula.
Counting is popcount; conjunction/disjunction are bitwise and/or. Everything
here evaluates semantics directly and never touches the engine's counters.
"""
from policylens.logic import (
    KIND_AND,
    KIND_FALSE,
    KIND_LIT,
    KIND_OR,
    KIND_TRUE,
    NnfDag,
)


def var_pattern(var_id: int, n: int) -> int:
    """2^n-bit pattern of assignments where variable var_id is true."""
    half = 1 << var_id
    pat = ((1 << half) - 1) << half
    width = 1 << (var_id + 1)
    total = 1 << n
    while width < total:
        pat |= pat << width
        width <<= 1
    return pat


def literal_pattern(slit: int, n: int) -> int:
    pat = var_pattern(abs(slit) - 1, n)
    if slit < 0:
        pat = ~pat & ((1 << (1 << n)) - 1)
    return pat


def dag_models(dag: NnfDag, n: int = None) -> int:
    """Model set of the circuit over n variables (default: its schema)."""
    n = dag.num_vars if n is None else n
    full = (1 << (1 << n)) - 1
    store = dag.store
    val = {}
    for node in dag.nodes():
        k = store.kinds[node]
        if k == KIND_TRUE:
            val[node] = full
        elif k == KIND_FALSE:
            val[node] = 0
        elif k == KIND_LIT:
            val[node] = literal_pattern(store.payloads[node], n)
        elif k == KIND_AND:
            acc = full
            for c in store.payloads[node]:
                acc &= val[c]
            val[node] = acc
        elif k == KIND_OR:
            acc = 0
            for c in store.payloads[node]:
                acc |= val[c]
            val[node] = acc
    return val[dag.root]


def cnf_models(clauses, n: int) -> int:
    full = (1 << (1 << n)) - 1
    acc = full
    for cl in clauses:
        m = 0
        for lit in cl:
            m |= literal_pattern(lit, n)
        acc &= m
    return acc


def dnf_models(terms, n: int) -> int:
    acc = 0
    full = (1 << (1 << n)) - 1
    for term in terms:
        m = full
        for lit in term:
            m &= literal_pattern(lit, n)
        acc |= m
    return acc


def evidence_pattern(assignment: dict[int, bool], n: int) -> int:
    """Assignments consistent with a partial {var_id: value} map."""
    acc = (1 << (1 << n)) - 1
    for var_id, value in assignment.items():
        acc &= literal_pattern(var_id + 1 if value else -(var_id + 1), n)
    return acc


def count(models: int) -> int:
    return models.bit_count()


def iter_models(models: int, n: int):
    """Yield each satisfying assignment as a tuple of n bits."""
    for a in range(1 << n):
        if models >> a & 1:
            yield tuple((a >> v) & 1 for v in range(n))
