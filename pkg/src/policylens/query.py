"""On-line queries over a compiled circuit: condition, count, likelihoods.

All probabilities are exact rationals: ratios of model counts under evidence.
Counts are taken over the full variable universe of the compiled theory
(state variables, action indicators and hidden selectors); the selector
encoding is count-preserving, so these equal counts over the original
variables, i.e. the number of distinct observations consistent with the
evidence.

Counting under evidence runs as one fused bottom-up pass (leaf weights 0/1
with conditioned variables excluded from the smoothing correction), which is
exactly the count of the conditioned circuit over the unassigned variables.
Queries never recompile and never mutate the theory; `condition` materializes
a new root in the same append-only store.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional

from . import _kernel, compiler
from .logic import NnfDag, Variable, iter_bits
from .traces import Schema, TraceSet, dnf_to_cnf, encode_dnf

Evidence = Mapping[str, bool]


class QueryError(ValueError):
    """Unknown variable, malformed evidence, or an unusable count domain."""


class ZeroCountEvidence(QueryError):
    """Evidence with no supporting observations (count 0).

    Deliberately distinct from a zero probability: "never happens given what
    we saw" versus "we never saw this situation at all".
    """

    def __init__(self, evidence: Evidence):
        super().__init__(f"no supporting observations for evidence {dict(evidence)}")
        self.evidence = dict(evidence)


@dataclass(frozen=True)
class Theory:
    """A compiled d-DNNF over a trace schema, ready for queries."""

    dag: NnfDag
    schema: Schema
    selector_count: int
    provenance: dict = field(default_factory=dict)

    @classmethod
    def from_traces(cls, traces: TraceSet) -> tuple["Theory", compiler.CompileStats]:
        dnf = encode_dnf(traces)
        cnf, selectors = dnf_to_cnf(dnf)
        schema_vars = traces.schema.variables(len(selectors))
        dag, stats = compiler.compile_cnf(cnf, schema=schema_vars)
        theory = cls(dag, traces.schema, len(selectors), dict(traces.provenance))
        return theory, stats

    @property
    def universe_mask(self) -> int:
        return (1 << self.dag.num_vars) - 1

    @property
    def visible_names(self) -> tuple[str, ...]:
        k = self.schema.num_state_vars + len(self.schema.actions)
        return tuple(v.name for v in self.dag.schema[:k])

    def var_id(self, name: str) -> int:
        """Resolve a state-variable or action-indicator name; selectors are
        hidden internals and unknown names are rejected."""
        try:
            idx = self.visible_names.index(name)
        except ValueError:
            raise QueryError(f"unknown variable {name!r}") from None
        return idx

    def evidence_masks(self, evidence: Evidence) -> tuple[int, int]:
        pos = neg = 0
        for name, value in evidence.items():
            bit = 1 << self.var_id(name)
            if (pos | neg) & bit:
                raise QueryError(f"variable {name!r} assigned twice")
            if value:
                pos |= bit
            else:
                neg |= bit
        return pos, neg

    def model_count(self) -> int:
        """Total models over the universe = number of distinct observations."""
        return count_under(self.dag, {})

    # -- persistence: c2d NNF plus a named-schema sidecar --

    def save(self, path: Path) -> None:
        path = Path(path)
        path.write_text(compiler.export_nnf(self.dag))
        meta = self.schema.as_dict()
        meta["selector_count"] = self.selector_count
        if self.provenance:
            meta["provenance"] = self.provenance
        theory_sidecar_path(path).write_text(json.dumps(meta, indent=2) + "\n")

    @classmethod
    def load(cls, path: Path) -> "Theory":
        path = Path(path)
        side = theory_sidecar_path(path)
        if not side.exists():
            raise QueryError(f"missing theory sidecar {side}")
        meta = json.loads(side.read_text())
        schema = Schema.from_dict(meta)
        selector_count = int(meta.get("selector_count", 0))
        dag = compiler.import_nnf(
            path.read_text(), schema=schema.variables(selector_count)
        )
        return cls(dag, schema, selector_count, meta.get("provenance", {}))


def theory_sidecar_path(path: Path) -> Path:
    return path.with_name(path.stem + ".schema.json")


# --- circuit-level operations -------------------------------------------------


def condition(dag: NnfDag, evidence: Mapping[str, bool]) -> NnfDag:
    """Fix variables to constants and simplify; stays d-DNNF, linear one pass."""
    pos = neg = 0
    names = {v.name: v.id for v in dag.schema}
    for name, value in evidence.items():
        if name not in names:
            raise QueryError(f"unknown variable {name!r}")
        bit = 1 << names[name]
        if (pos | neg) & bit:
            raise QueryError(f"variable {name!r} assigned twice")
        if value:
            pos |= bit
        else:
            neg |= bit
    return condition_masks(dag, pos, neg)


def condition_masks(dag: NnfDag, pos_mask: int, neg_mask: int) -> NnfDag:
    store = dag.store
    root = _kernel.condition_kernel(
        store.kinds, store.payloads, store.masks, store._index, dag.root, pos_mask, neg_mask
    )
    return NnfDag(store, root, dag.schema)


def smooth(dag: NnfDag, over: Optional[Iterable[Variable]] = None) -> NnfDag:
    """Materialize smoothness: conjoin (v or ~v) gadgets onto or-node children
    missing variables, and pad the root to mention everything in ``over``."""
    store = dag.store
    over_mask = 0
    if over is None:
        over_mask = (1 << dag.num_vars) - 1
    else:
        for v in over:
            over_mask |= 1 << v.id

    def gadget(var_id: int) -> int:
        return store.mk_or([store.mk_lit(var_id + 1), store.mk_lit(-(var_id + 1))])

    def pad(node: int, missing_mask: int) -> int:
        if not missing_mask:
            return node
        return store.mk_and([node] + [gadget(b) for b in iter_bits(missing_mask)])

    new: dict[int, int] = {}
    for n in dag.nodes():
        k = store.kinds[n]
        if k == _kernel.KIND_AND:
            new[n] = store.mk_and([new[c] for c in store.payloads[n]])
        elif k == _kernel.KIND_OR:
            union = store.masks[n]
            kids = [
                pad(new[c], union & ~store.masks[new[c]]) for c in store.payloads[n]
            ]
            new[n] = store.mk_or(kids)
        else:
            new[n] = n
    root = pad(new[dag.root], over_mask & ~store.masks[new[dag.root]])
    return NnfDag(store, root, dag.schema)


def model_count(dag: NnfDag, over: Optional[Iterable[Variable]] = None) -> int:
    """Exact satisfying-assignment count over ``over`` (default: full schema).

    Smoothing is applied lazily inside the counting pass rather than
    materialized."""
    store = dag.store
    if over is None:
        over_mask = (1 << dag.num_vars) - 1
    else:
        over_mask = 0
        for v in over:
            over_mask |= 1 << v.id
    if store.masks[dag.root] & ~over_mask:
        missing = [
            dag.schema[b].name for b in iter_bits(store.masks[dag.root] & ~over_mask)
        ]
        raise QueryError(f"count domain must cover the circuit; missing {missing}")
    return _kernel.count_kernel(
        store.kinds, store.payloads, store.masks, dag.root, over_mask, 0, 0
    )


def count_under(dag: NnfDag, evidence: Mapping[str, bool] = (), *,
                pos_mask: int = 0, neg_mask: int = 0) -> int:
    """Models of the theory consistent with the evidence, counted over the
    unassigned variables: count(condition(dag, evidence)) in one fused pass."""
    if evidence:
        names = {v.name: v.id for v in dag.schema}
        for name, value in dict(evidence).items():
            if name not in names:
                raise QueryError(f"unknown variable {name!r}")
            bit = 1 << names[name]
            if value:
                pos_mask |= bit
            else:
                neg_mask |= bit
    store = dag.store
    free = ((1 << dag.num_vars) - 1) & ~(pos_mask | neg_mask)
    return _kernel.count_kernel(
        store.kinds, store.payloads, store.masks, dag.root, free, pos_mask, neg_mask
    )


# --- likelihood queries ---------------------------------------------------------


def probability(
    dag: NnfDag, target: str, evidence: Evidence = (), value: bool = True
) -> Fraction:
    """P(target=value | evidence) = count(theory | evidence+target) /
    count(theory | evidence), both exact."""
    evidence = dict(evidence)
    if target in evidence:
        raise QueryError(f"target {target!r} already fixed by the evidence")
    den = count_under(dag, evidence)
    if den == 0:
        raise ZeroCountEvidence(evidence)
    evidence[target] = value
    num = count_under(dag, evidence)
    return Fraction(num, den)


@dataclass(frozen=True)
class QueryResult:
    """Exact likelihoods for a block of targets under evidence."""

    evidence: dict[str, bool]
    count: int
    likelihoods: dict[str, Fraction]

    def as_dict(self) -> dict:
        return {
            "evidence": dict(self.evidence),
            "count": str(self.count),
            "likelihoods": {
                name: {
                    "p": format_significant(p),
                    "num": str(p.numerator),
                    "den": str(p.denominator),
                }
                for name, p in self.likelihoods.items()
            },
        }


def action_likelihood(theory: Theory, evidence: Evidence = ()) -> QueryResult:
    """Distribution over the one-hot action block given state evidence."""
    evidence = dict(evidence)
    for name in evidence:
        if name not in theory.schema.state_variables:
            raise QueryError(
                f"action-likelihood evidence must mention state variables only, got {name!r}"
            )
    pos, neg = theory.evidence_masks(evidence)
    den = count_under(theory.dag, pos_mask=pos, neg_mask=neg)
    if den == 0:
        raise ZeroCountEvidence(evidence)
    k = theory.schema.num_state_vars
    probs = {}
    for a_idx, action in enumerate(theory.schema.actions):
        bit = 1 << (k + a_idx)
        num = count_under(theory.dag, pos_mask=pos | bit, neg_mask=neg)
        probs[action] = Fraction(num, den)
    return QueryResult(evidence, den, probs)


def state_likelihood(
    theory: Theory, action: str, evidence: Evidence = ()
) -> QueryResult:
    """P(state variable = 1) for every state variable, given the action
    (and optional extra state evidence)."""
    if action not in theory.schema.actions:
        raise QueryError(f"unknown action {action!r}")
    evidence = dict(evidence)
    indicator = theory.schema.action_indicator(action)
    evidence[indicator] = True
    pos, neg = theory.evidence_masks(evidence)
    den = count_under(theory.dag, pos_mask=pos, neg_mask=neg)
    if den == 0:
        raise ZeroCountEvidence(evidence)
    probs = {}
    for v_idx, name in enumerate(theory.schema.state_variables):
        bit = 1 << v_idx
        if pos & bit:
            probs[name] = Fraction(1)
        elif neg & bit:
            probs[name] = Fraction(0)
        else:
            num = count_under(theory.dag, pos_mask=pos | bit, neg_mask=neg)
            probs[name] = Fraction(num, den)
    return QueryResult(evidence, den, probs)


def format_significant(value: Fraction, sig: int = 4) -> str:
    """Exact decimal rendering with ``sig`` significant digits, half-even.

    Pure integer arithmetic so the CLI, the service, and the UI can agree to
    the last digit.
    """
    if value == 0:
        return "0"
    sign = "-" if value < 0 else ""
    value = -value if value < 0 else value
    num, den = value.numerator, value.denominator
    e = len(str(num)) - len(str(den))
    while 10 ** max(e, 0) * den > num * 10 ** max(-e, 0):
        e -= 1
    while 10 ** max(e + 1, 0) * den <= num * 10 ** max(-(e + 1), 0):
        e += 1
    shift = sig - 1 - e
    scaled = (
        Fraction(num * 10**shift, den) if shift >= 0 else Fraction(num, den * 10**-shift)
    )
    q = round(scaled)
    digits = str(q)
    if len(digits) > sig:
        q //= 10
        e += 1
        digits = str(q)
    if e >= sig - 1:
        text = digits + "0" * (e - sig + 1)
    elif e >= 0:
        text = digits[: e + 1] + "." + digits[e + 1 :]
    else:
        text = "0." + "0" * (-e - 1) + digits
    return sign + text


def format_percent(value: Fraction, sig: int = 4) -> str:
    return format_significant(value * 100, sig) + "%"
