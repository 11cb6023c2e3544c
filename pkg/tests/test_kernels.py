"""Backend parity: the Cython extension and pure Python must agree node for node.

Runs only when the compiled extension is importable; variable counts
deliberately cross the 64-bit boundary where C-int arithmetic would break.
"""
import random

import pytest

from policylens._kernel import pure

try:
    from policylens._kernel import _speedups
except ImportError:
    _speedups = None

pytestmark = pytest.mark.skipif(_speedups is None, reason="compiled kernel unavailable")


def fresh_store():
    return [0, 1], [None, None], [0, 0], {}


def random_clauses(rng, num_vars, num_clauses):
    clauses = []
    for _ in range(num_clauses):
        width = rng.randint(1, min(4, num_vars))
        vs = rng.sample(range(1, num_vars + 1), width)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return clauses


@pytest.mark.parametrize("num_vars", [5, 12, 63, 64, 65, 100])
def test_compile_parity(num_vars):
    rng = random.Random(num_vars)
    for _ in range(8):
        clauses = random_clauses(rng, num_vars, rng.randint(0, 3 * num_vars))
        stores = fresh_store(), fresh_store()
        roots = []
        for backend, store in zip((pure, _speedups), stores):
            root, stats = backend.compile_kernel(*store, clauses, True)
            roots.append(root)
        assert stores[0] == stores[1]
        assert roots[0] == roots[1]


@pytest.mark.parametrize("num_vars", [8, 64, 90])
def test_count_and_condition_parity(num_vars):
    rng = random.Random(num_vars + 1)
    clauses = random_clauses(rng, num_vars, 2 * num_vars)
    store_p, store_c = fresh_store(), fresh_store()
    root_p, _ = pure.compile_kernel(*store_p, clauses, True)
    root_c, _ = _speedups.compile_kernel(*store_c, clauses, True)
    universe = (1 << num_vars) - 1
    for _ in range(10):
        pos = neg = 0
        for v in range(num_vars):
            r = rng.random()
            if r < 0.1:
                pos |= 1 << v
            elif r < 0.2:
                neg |= 1 << v
        free = universe & ~(pos | neg)
        count_p = pure.count_kernel(store_p[0], store_p[1], store_p[2], root_p, free, pos, neg)
        count_c = _speedups.count_kernel(store_c[0], store_c[1], store_c[2], root_c, free, pos, neg)
        assert count_p == count_c
        new_p = pure.condition_kernel(*store_p, root_p, pos, neg)
        new_c = _speedups.condition_kernel(*store_c, root_c, pos, neg)
        assert new_p == new_c
        assert store_p == store_c


def test_mk_gate_parity_on_edge_cases():
    cases = [
        ("and", [0]),  # true identity only
        ("and", [1]),  # false absorbs
        ("or", [0]),
        ("or", [1]),
    ]
    store_p, store_c = fresh_store(), fresh_store()
    lits = {}
    for slit in (1, -1, 2, -2, 70, -70):
        a = pure.mk_lit(*store_p, slit)
        b = _speedups.mk_lit(*store_c, slit)
        assert a == b
        lits[slit] = a
    for kind_name, kids in cases:
        kind = pure.KIND_AND if kind_name == "and" else pure.KIND_OR
        assert pure.mk_gate(*store_p, kind, kids) == _speedups.mk_gate(*store_c, kind, kids)
    # nested flatten + dedup + sort across the 64-var boundary
    inner_p = pure.mk_gate(*store_p, pure.KIND_AND, [lits[1], lits[70]])
    inner_c = _speedups.mk_gate(*store_c, pure.KIND_AND, [lits[1], lits[70]])
    outer_p = pure.mk_gate(*store_p, pure.KIND_AND, [inner_p, lits[2], lits[2]])
    outer_c = _speedups.mk_gate(*store_c, pure.KIND_AND, [inner_c, lits[2], lits[2]])
    assert outer_p == outer_c
    assert store_p == store_c


def test_backend_reports_name():
    assert pure.BACKEND == "pure"
    assert _speedups.BACKEND == "compiled"
