"""Trace encoding: DNF terms, conflict detection, selector CNF, JSONL I/O."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from policylens.traces import (
    Schema,
    TraceError,
    TraceSet,
    detect_policy_conflicts,
    dnf_to_cnf,
    encode_dnf,
    read_traces,
    write_traces,
)

from _oracle import cnf_models, count, dnf_models, iter_models


def two_var_schema():
    return Schema(("x", "y"), ("A", "B"))


def test_schema_validation():
    with pytest.raises(TraceError):
        Schema((), ("A", "B"))
    with pytest.raises(TraceError):
        Schema(("x",), ("A",))
    with pytest.raises(TraceError):
        Schema(("x", "x"), ("A", "B"))


def test_single_observation_term():
    ts = TraceSet(two_var_schema())
    ts.append((1, 0), "A")
    dnf = encode_dnf(ts)
    # x, ~y, action A positive, action B negative
    assert dnf.terms == ((1, -2, 3, -4),)


def test_duplicates_collapse():
    ts = TraceSet(two_var_schema())
    ts.append((1, 0), "A")
    ts.append((1, 0), "A")
    assert len(encode_dnf(ts).terms) == 1


def test_empty_traces_rejected():
    with pytest.raises(TraceError):
        encode_dnf(TraceSet(two_var_schema()))


def test_bad_rows_rejected():
    ts = TraceSet(two_var_schema())
    with pytest.raises(TraceError):
        ts.append((1,), "A")
    with pytest.raises(TraceError):
        ts.append((1, 2), "A")
    with pytest.raises(TraceError):
        ts.append((1, 0), "C")


def test_conflict_detection():
    ts = TraceSet(two_var_schema())
    ts.append((1, 0), "A")
    ts.append((1, 0), "B")
    ts.append((0, 0), "A")
    ts.append((0, 0), "A")
    assert detect_policy_conflicts(ts) == [((1, 0), {"A", "B"})]

    clean = TraceSet(two_var_schema())
    clean.append((1, 0), "A")
    clean.append((1, 0), "A")
    assert detect_policy_conflicts(clean) == []


def test_selector_encoding_single_term():
    ts = TraceSet(two_var_schema())
    ts.append((1, 1), "A")
    dnf = encode_dnf(ts)
    cnf, selectors = dnf_to_cnf(dnf)
    assert selectors == (4,)  # one selector after x, y, a_A, a_B
    assert cnf.num_vars == 5
    # sigma -> literal clauses, reverse clause, cover clause
    assert len(cnf.clauses) == len(dnf.terms[0]) + 1 + 1
    assert count(cnf_models(cnf.clauses, cnf.num_vars)) == count(
        dnf_models(dnf.terms, dnf.num_vars)
    )


def test_clause_count_formula():
    ts = TraceSet(two_var_schema())
    ts.append((1, 0), "A")
    ts.append((0, 0), "B")
    ts.append((0, 1), "B")
    dnf = encode_dnf(ts)
    cnf, selectors = dnf_to_cnf(dnf)
    m = len(dnf.terms)
    assert len(selectors) == m
    assert len(cnf.clauses) == sum(len(t) + 1 for t in dnf.terms) + 1


def test_one_hot_soundness():
    ts = TraceSet(Schema(("x",), ("A", "B", "C")))
    ts.append((1,), "A")
    ts.append((0,), "C")
    dnf = encode_dnf(ts)
    for model in iter_models(dnf_models(dnf.terms, dnf.num_vars), dnf.num_vars):
        assert sum(model[1:4]) == 1


def random_traceset(rng, max_state=8, max_actions=4, max_rows=50):
    k = rng.randint(1, max_state)
    a = rng.randint(2, max_actions)
    schema = Schema(
        tuple(f"s{i}" for i in range(k)), tuple(f"act{j}" for j in range(a))
    )
    ts = TraceSet(schema)
    for _ in range(rng.randint(1, max_rows)):
        ts.append(
            tuple(rng.randint(0, 1) for _ in range(k)),
            schema.actions[rng.randrange(a)],
        )
    return ts


def test_count_preservation_random():
    rng = random.Random(42)
    for _ in range(30):
        ts = random_traceset(rng, max_state=6, max_actions=3, max_rows=20)
        dnf = encode_dnf(ts)
        cnf, _ = dnf_to_cnf(dnf)
        if cnf.num_vars > 18:
            continue  # keep the truth table tractable
        dnf_count = count(dnf_models(dnf.terms, dnf.num_vars))
        cnf_count = count(cnf_models(cnf.clauses, cnf.num_vars))
        assert dnf_count == cnf_count == len(ts.distinct())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_every_observation_is_a_model(seed):
    rng = random.Random(seed)
    ts = random_traceset(rng, max_state=5, max_actions=3, max_rows=12)
    dnf = encode_dnf(ts)
    models = dnf_models(dnf.terms, dnf.num_vars)
    k = ts.schema.num_state_vars
    seen_states = set()
    for model in iter_models(models, dnf.num_vars):
        seen_states.add(model[:k])
    for obs in ts.observations:
        assert obs.state in seen_states
        # the exact observation row is a model: state bits + one-hot action
        a_idx = ts.schema.actions.index(obs.action)
        full = list(obs.state) + [0] * len(ts.schema.actions)
        full[k + a_idx] = 1
        idx = sum(b << i for i, b in enumerate(full))
        assert models >> idx & 1


def test_jsonl_roundtrip(tmp_path):
    ts = TraceSet(two_var_schema(), provenance={"seed": 7})
    ts.append((1, 0), "A")
    ts.append((0, 1), "B")
    path = tmp_path / "traces.jsonl"
    write_traces(ts, path)
    assert (tmp_path / "traces.schema.json").exists()
    back = read_traces(path)
    assert back.schema == ts.schema
    assert back.observations == ts.observations
    assert back.provenance == {"seed": 7}


def test_read_missing_sidecar(tmp_path):
    path = tmp_path / "traces.jsonl"
    path.write_text('{"state": {"x": 1}, "action": "A"}\n')
    with pytest.raises(TraceError):
        read_traces(path)
