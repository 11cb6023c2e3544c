"""State-action observations and their logical encodings.

A trace set becomes a DNF with one conjunctive term per distinct observation
(state bits plus a one-hot block of action indicators), then a CNF through the
biconditional selector encoding, which preserves the model count over the full
variable set: every assignment of the original variables extends to exactly
one assignment of the selectors.

Likelihoods downstream are therefore uniform over *distinct* observed
state-action pairs; repeated observations collapse to one model.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .logic import CnfFormula, DnfFormula, LogicError, Variable, make_schema

ACTION_PREFIX = "action="
SELECTOR_PREFIX = "_sel"


class TraceError(ValueError):
    """Trace data that violates its schema or is unusable (e.g. empty)."""


@dataclass(frozen=True)
class Schema:
    """Variable layout of a trace set: state variable names plus action labels."""

    state_variables: tuple[str, ...]
    actions: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.state_variables) < 1:
            raise TraceError("schema needs at least one state variable")
        if len(self.actions) < 2:
            raise TraceError("schema needs at least two actions")
        names = list(self.state_variables) + list(self.actions)
        if len(set(names)) != len(names):
            raise TraceError("state variable and action names must be unique")

    @property
    def num_state_vars(self) -> int:
        return len(self.state_variables)

    def action_indicator(self, action: str) -> str:
        return ACTION_PREFIX + action

    def variables(self, selector_count: int = 0) -> tuple[Variable, ...]:
        """Dense schema: state vars, then action indicators, then selectors."""
        names = list(self.state_variables)
        names += [self.action_indicator(a) for a in self.actions]
        names += [f"{SELECTOR_PREFIX}{i}" for i in range(selector_count)]
        return make_schema(names)

    def as_dict(self) -> dict:
        return {
            "state_variables": list(self.state_variables),
            "actions": list(self.actions),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Schema":
        return cls(tuple(d["state_variables"]), tuple(d["actions"]))


@dataclass(frozen=True)
class Observation:
    state: tuple[int, ...]
    action: str


@dataclass
class TraceSet:
    schema: Schema
    observations: list[Observation] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def append(self, state: Sequence[int], action: str) -> None:
        state = tuple(int(b) for b in state)
        if len(state) != self.schema.num_state_vars:
            raise TraceError(
                f"state has {len(state)} bits, schema expects {self.schema.num_state_vars}"
            )
        if any(b not in (0, 1) for b in state):
            raise TraceError("state bits must be 0 or 1")
        if action not in self.schema.actions:
            raise TraceError(f"unknown action {action!r}")
        self.observations.append(Observation(state, action))

    def extend(self, rows: Iterable[tuple[Sequence[int], str]]) -> None:
        for state, action in rows:
            self.append(state, action)

    def distinct(self) -> list[Observation]:
        """Distinct observations in first-seen order."""
        seen = set()
        out = []
        for obs in self.observations:
            if obs not in seen:
                seen.add(obs)
                out.append(obs)
        return out

    def __len__(self) -> int:
        return len(self.observations)


def encode_dnf(traces: TraceSet) -> DnfFormula:
    """One conjunctive term per distinct observation.

    State bits become positive/negative literals; the observed action's
    indicator is positive and all other indicators negative (one-hot).
    """
    if not traces.observations:
        raise TraceError("cannot encode an empty trace set")
    schema = traces.schema
    k = schema.num_state_vars
    terms = []
    for obs in traces.distinct():
        lits = [(j + 1) if bit else -(j + 1) for j, bit in enumerate(obs.state)]
        for a_idx, action in enumerate(schema.actions):
            var = k + a_idx + 1
            lits.append(var if action == obs.action else -var)
        terms.append(tuple(lits))
    return DnfFormula(tuple(terms), schema.variables())


def detect_policy_conflicts(traces: TraceSet) -> list[tuple[tuple[int, ...], set[str]]]:
    """States observed with two or more distinct actions.

    The encoding keeps all rows regardless; a non-empty result means the
    deterministic-policy assumption is violated and likelihoods mix rows.
    """
    by_state: dict[tuple[int, ...], set[str]] = {}
    for obs in traces.observations:
        by_state.setdefault(obs.state, set()).add(obs.action)
    return sorted((s, acts) for s, acts in by_state.items() if len(acts) > 1)


def dnf_to_cnf(dnf: DnfFormula) -> tuple[CnfFormula, tuple[int, ...]]:
    """Biconditional selector encoding of a DNF.

    Per term C_i a fresh selector s_i with clauses (~s_i | l) for every
    literal l of C_i and (s_i | ~l_1 | .. | ~l_k), plus one cover clause
    (s_1 | .. | s_m). Returns the CNF and the selectors' 0-based variable ids.
    The model count over all variables equals the DNF count over the
    original variables.
    """
    if not dnf.terms:
        raise LogicError("cannot translate an empty DNF")
    n = dnf.num_vars
    clauses: list[tuple[int, ...]] = []
    selectors = []
    for i, term in enumerate(dnf.terms):
        sel = n + i + 1
        selectors.append(sel - 1)
        for lit in term:
            clauses.append((-sel, lit))
        clauses.append(tuple([sel] + [-lit for lit in term]))
    clauses.append(tuple(n + i + 1 for i in range(len(dnf.terms))))
    return CnfFormula(n + len(dnf.terms), tuple(clauses)), tuple(selectors)


# --- JSON Lines I/O -----------------------------------------------------------


def sidecar_path(traces_path: Path) -> Path:
    return traces_path.with_name(traces_path.stem + ".schema.json")


def write_traces(traces: TraceSet, path: Path) -> None:
    """JSONL observations plus a schema sidecar next to the file."""
    path = Path(path)
    with path.open("w") as fh:
        for obs in traces.observations:
            row = {
                "state": {
                    name: bit
                    for name, bit in zip(traces.schema.state_variables, obs.state)
                },
                "action": obs.action,
            }
            fh.write(json.dumps(row) + "\n")
    sidecar = traces.schema.as_dict()
    if traces.provenance:
        sidecar["provenance"] = traces.provenance
    sidecar_path(path).write_text(json.dumps(sidecar, indent=2) + "\n")


def read_traces(path: Path) -> TraceSet:
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        raise TraceError(f"missing schema sidecar {side}")
    try:
        meta = json.loads(side.read_text())
        schema = Schema.from_dict(meta)
    except (KeyError, json.JSONDecodeError) as exc:
        raise TraceError(f"bad schema sidecar {side}: {exc}") from exc
    traces = TraceSet(schema, provenance=meta.get("provenance", {}))
    with path.open() as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                state_map = row["state"]
                action = row["action"]
                state = [int(state_map[name]) for name in schema.state_variables]
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise TraceError(f"{path}:{line_no}: bad observation: {exc}") from exc
            traces.append(state, action)
    return traces
