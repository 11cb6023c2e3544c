"""Propositional theories as hash-consed and/or DAGs, plus d-DNNF validators.

Nodes live in a :class:`NodeStore`, an append-only arena with structural
deduplication: building the same formula twice returns the same node id.
Children of and/or nodes are kept sorted and flattened so structurally equal
formulas have a single canonical form. Variable sets are cached per node as
bitmasks (bit v = variable id v).

A finished :class:`NnfDag` is immutable and safe to share across threads for
reads; growing a store (construction, conditioning) is single-writer.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from . import _kernel
from ._kernel import (
    FALSE_ID,
    KIND_AND,
    KIND_FALSE,
    KIND_LIT,
    KIND_OR,
    KIND_TRUE,
    TRUE_ID,
)

KIND_NAMES = {
    KIND_TRUE: "true",
    KIND_FALSE: "false",
    KIND_LIT: "literal",
    KIND_AND: "and",
    KIND_OR: "or",
}


class LogicError(ValueError):
    """Malformed construction request (empty child list, bad ids)."""


@dataclass(frozen=True, order=True)
class Variable:
    """A propositional variable: dense id plus a schema-provided name."""

    id: int
    name: str


@dataclass(frozen=True)
class Literal:
    """A variable or its negation; negation never appears anywhere else."""

    variable: Variable
    polarity: bool = True

    def __invert__(self) -> "Literal":
        return Literal(self.variable, not self.polarity)

    @property
    def signed(self) -> int:
        """DIMACS-style signed encoding, 1-based."""
        v = self.variable.id + 1
        return v if self.polarity else -v

    def __str__(self) -> str:
        return self.variable.name if self.polarity else "~" + self.variable.name


def make_schema(names: Sequence[str]) -> tuple[Variable, ...]:
    """Variables with dense ids 0..n-1. Names must be unique."""
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if list(names).count(n) > 1})
        raise LogicError(f"duplicate variable names: {dupes}")
    return tuple(Variable(i, n) for i, n in enumerate(names))


class NodeStore:
    """Append-only node table with structural sharing.

    Node payloads: literals store their signed 1-based encoding; and/or nodes
    store a sorted tuple of child ids. ``masks[i]`` is the cached Vars() bitmask
    of node i. Children always exist before their parents, so store ids are a
    valid topological order.
    """

    __slots__ = ("kinds", "payloads", "masks", "_index")

    def __init__(self) -> None:
        self.kinds: list[int] = [KIND_TRUE, KIND_FALSE]
        self.payloads: list = [None, None]
        self.masks: list[int] = [0, 0]
        self._index: dict = {}

    def __len__(self) -> int:
        return len(self.kinds)

    def mk_lit(self, slit: int) -> int:
        """Node for a signed 1-based literal (e.g. -3 is the negation of var 2)."""
        if slit == 0:
            raise LogicError("literal 0 is not a variable")
        return _kernel.mk_lit(self.kinds, self.payloads, self.masks, self._index, slit)

    def mk_literal(self, lit: Literal) -> int:
        return self.mk_lit(lit.signed)

    def mk_and(self, children: Iterable[int]) -> int:
        return self._mk_gate(KIND_AND, children)

    def mk_or(self, children: Iterable[int]) -> int:
        return self._mk_gate(KIND_OR, children)

    def _mk_gate(self, kind: int, children: Iterable[int]) -> int:
        kids = list(children)
        if not kids:
            raise LogicError("and/or needs at least one child")
        for c in kids:
            if not 0 <= c < len(self.kinds):
                raise LogicError(f"unknown child node {c}")
        return _kernel.mk_gate(self.kinds, self.payloads, self.masks, self._index, kind, kids)

    def children(self, node: int) -> tuple[int, ...]:
        if self.kinds[node] in (KIND_AND, KIND_OR):
            return self.payloads[node]
        return ()

    def reachable(self, root: int) -> list[int]:
        """Reachable node ids in ascending (= topological) order."""
        seen = {root}
        stack = [root]
        while stack:
            n = stack.pop()
            for c in self.children(n):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return sorted(seen)

    def asserted_literals(self, node: int) -> frozenset[int]:
        """Signed literals this node asserts directly.

        A literal leaf asserts itself; an and node asserts its literal
        children. Used to recognize decision or-nodes.
        """
        k = self.kinds[node]
        if k == KIND_LIT:
            return frozenset((self.payloads[node],))
        if k == KIND_AND:
            return frozenset(
                self.payloads[c] for c in self.payloads[node] if self.kinds[c] == KIND_LIT
            )
        return frozenset()

    def decision_variable(self, node: int) -> Optional[int]:
        """0-based decision variable of a two-child or node, if it is one."""
        if self.kinds[node] != KIND_OR:
            return None
        kids = self.payloads[node]
        if len(kids) != 2:
            return None
        a, b = (self.asserted_literals(c) for c in kids)
        for slit in a:
            if -slit in b:
                return abs(slit) - 1
        return None


@dataclass(frozen=True)
class NnfDag:
    """An NNF circuit: a root node in a store plus the variable schema.

    The schema covers every variable the circuit may mention; circuits
    produced from trace encodings also include the hidden selector variables.
    """

    store: NodeStore
    root: int
    schema: tuple[Variable, ...]

    @property
    def num_vars(self) -> int:
        return len(self.schema)

    def variable(self, var_id: int) -> Variable:
        return self.schema[var_id]

    def by_name(self, name: str) -> Variable:
        for v in self.schema:
            if v.name == name:
                return v
        raise KeyError(name)

    def vars_of(self, node: Optional[int] = None) -> frozenset[Variable]:
        """Vars(C): the variables in the subgraph rooted at ``node``."""
        mask = self.store.masks[self.root if node is None else node]
        return frozenset(self.schema[i] for i in iter_bits(mask))

    def nodes(self) -> list[int]:
        return self.store.reachable(self.root)

    @property
    def node_count(self) -> int:
        return len(self.nodes())

    @property
    def edge_count(self) -> int:
        return sum(len(self.store.children(n)) for n in self.nodes())


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Violation:
    """First property violation found by a validator."""

    node: int
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} violated at node {self.node}: {self.detail}"


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.ok


def check_decomposability(dag: NnfDag) -> ValidationResult:
    """Every and node's children must have pairwise disjoint variable sets."""
    store = dag.store
    for n in dag.nodes():
        if store.kinds[n] != KIND_AND:
            continue
        acc = 0
        for c in store.payloads[n]:
            shared = acc & store.masks[c]
            if shared:
                names = [dag.schema[i].name for i in iter_bits(shared)]
                return ValidationResult(
                    False, Violation(n, "decomposability", f"conjuncts share {names}")
                )
            acc |= store.masks[c]
    return ValidationResult(True)


def check_determinism(dag: NnfDag) -> ValidationResult:
    """Structural determinism: every or node is a two-child decision node.

    One child must assert some literal x and the other ~x; this is how the
    compiler realizes pairwise-contradictory disjuncts. Semantic checking of
    arbitrary or-nodes is co-NP and out of scope.
    """
    store = dag.store
    for n in dag.nodes():
        if store.kinds[n] != KIND_OR:
            continue
        kids = store.payloads[n]
        if len(kids) != 2:
            return ValidationResult(
                False, Violation(n, "determinism", f"or node has {len(kids)} children")
            )
        if store.decision_variable(n) is None:
            return ValidationResult(
                False,
                Violation(n, "determinism", "no variable asserted positively in one "
                          "disjunct and negatively in the other"),
            )
    return ValidationResult(True)


def check_smoothness(dag: NnfDag, over: Optional[frozenset[Variable]] = None) -> ValidationResult:
    """Every or node's disjuncts must mention identical variable sets.

    With ``over`` given, the root must additionally mention exactly those
    variables (a FalseLeaf root is vacuously smooth).
    """
    store = dag.store
    for n in dag.nodes():
        if store.kinds[n] != KIND_OR:
            continue
        kids = store.payloads[n]
        first = store.masks[kids[0]]
        for c in kids[1:]:
            if store.masks[c] != first:
                diff = store.masks[c] ^ first
                names = [dag.schema[i].name for i in iter_bits(diff)]
                return ValidationResult(
                    False, Violation(n, "smoothness", f"disjuncts differ on {names}")
                )
    if over is not None and dag.root != FALSE_ID:
        want = 0
        for v in over:
            want |= 1 << v.id
        if store.masks[dag.root] != want:
            missing = [dag.schema[i].name for i in iter_bits(want & ~store.masks[dag.root])]
            return ValidationResult(
                False, Violation(dag.root, "smoothness", f"root does not mention {missing}")
            )
    return ValidationResult(True)


@dataclass(frozen=True)
class DnfFormula:
    """Flat disjunction of conjunctions; terms hold signed 1-based literals."""

    terms: tuple[tuple[int, ...], ...]
    schema: tuple[Variable, ...]

    @property
    def num_vars(self) -> int:
        return len(self.schema)


@dataclass(frozen=True)
class CnfFormula:
    """Flat conjunction of disjunctions; clauses hold signed 1-based literals.

    Zero clauses is the valid (all-true) theory; an empty clause makes the
    formula unsatisfiable.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for cl in self.clauses:
            for lit in cl:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise LogicError(f"literal {lit} out of range for {self.num_vars} vars")


def dag_from_terms(
    store: NodeStore, terms: Iterable[Sequence[int]], schema: tuple[Variable, ...]
) -> NnfDag:
    """Flat NNF of a DNF term list (no determinism guarantee). Test/demo helper."""
    nodes = [store.mk_and([store.mk_lit(l) for l in t]) for t in terms]
    root = store.mk_or(nodes) if nodes else FALSE_ID
    return NnfDag(store, root, schema)


def anonymous_schema(n: int) -> tuple[Variable, ...]:
    return make_schema([f"v{i + 1}" for i in range(n)])


def pairwise_disjoint(masks: Iterable[int]) -> bool:
    acc = 0
    for m in masks:
        if acc & m:
            return False
        acc |= m
    return True


def format_dag(dag: NnfDag, max_nodes: int = 200) -> str:
    """Debug rendering, one node per line in topological order."""
    lines = []
    for n in itertools.islice(dag.nodes(), max_nodes):
        k = dag.store.kinds[n]
        if k == KIND_LIT:
            slit = dag.store.payloads[n]
            name = dag.schema[abs(slit) - 1].name
            lines.append(f"{n}: lit {'' if slit > 0 else '~'}{name}")
        elif k in (KIND_AND, KIND_OR):
            kids = " ".join(map(str, dag.store.payloads[n]))
            lines.append(f"{n}: {KIND_NAMES[k]} [{kids}]")
        else:
            lines.append(f"{n}: {KIND_NAMES[k]}")
    return "\n".join(lines)
