"""Benchmark: compiled Cython kernels vs the pure-Python fallback.

Times the two hot paths on identical inputs:
  * CNF -> d-DNNF compilation (random 3-CNF batches and a trace-style
    selector encoding),
  * fused condition+count query passes over the compiled circuit.

Run:  python benchmarks/bench_kernels.py
"""
import random
import statistics
import time

from policylens._kernel import pure

try:
    from policylens._kernel import _speedups
except ImportError:
    _speedups = None


def fresh_store():
    return [0, 1], [None, None], [0, 0], {}


def random_cnf(rng, num_vars, num_clauses):
    clauses = []
    for _ in range(num_clauses):
        width = rng.randint(2, 3)
        vs = rng.sample(range(1, num_vars + 1), width)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return clauses


def trace_style_cnf(rng, state_vars=12, actions=4, rows=300):
    """Selector encoding of a random deterministic policy trace."""
    n = state_vars + actions
    seen = {}
    while len(seen) < rows:
        state = tuple(rng.randint(0, 1) for _ in range(state_vars))
        seen.setdefault(state, rng.randrange(actions))
    clauses = []
    selectors = []
    for i, (state, act) in enumerate(sorted(seen.items())):
        term = [(j + 1) if b else -(j + 1) for j, b in enumerate(state)]
        term += [
            (state_vars + a + 1) if a == act else -(state_vars + a + 1)
            for a in range(actions)
        ]
        sel = n + i + 1
        selectors.append(sel)
        for lit in term:
            clauses.append((-sel, lit))
        clauses.append(tuple([sel] + [-l for l in term]))
    clauses.append(tuple(selectors))
    return n + len(selectors), clauses


def bench_compile(backend, batches):
    t0 = time.perf_counter()
    roots = []
    for clauses in batches:
        store = fresh_store()
        root, _ = backend.compile_kernel(*store, clauses, True)
        roots.append((root, store))
    return time.perf_counter() - t0, roots


def bench_queries(backend, store, root, num_vars, n_queries=2000, seed=5):
    rng = random.Random(seed)
    universe = (1 << num_vars) - 1
    times = []
    for _ in range(n_queries):
        pos = neg = 0
        for v in range(min(num_vars, 16)):
            r = rng.random()
            if r < 0.15:
                pos |= 1 << v
            elif r < 0.3:
                neg |= 1 << v
        free = universe & ~(pos | neg)
        t0 = time.perf_counter()
        backend.count_kernel(store[0], store[1], store[2], root, free, pos, neg)
        times.append(time.perf_counter() - t0)
    return times


def main():
    backends = [("pure", pure)]
    if _speedups is not None:
        backends.append(("compiled", _speedups))
    else:
        print("compiled extension not built; benchmarking pure only")

    rng = random.Random(1)
    cnf_batch = [random_cnf(rng, 20, 60) for _ in range(60)]
    trace_vars, trace_clauses = trace_style_cnf(rng)

    print(f"{'benchmark':<34}" + "".join(f"{name:>12}" for name, _ in backends))

    rows = []
    compile_times = {}
    for name, backend in backends:
        dt, _ = bench_compile(backend, cnf_batch)
        compile_times[name] = dt
    rows.append(("compile 60 random 3-CNFs (s)", {n: f"{t:.3f}" for n, t in compile_times.items()}))

    trace_roots = {}
    trace_compile = {}
    for name, backend in backends:
        store = fresh_store()
        t0 = time.perf_counter()
        root, _ = backend.compile_kernel(*store, trace_clauses, True)
        trace_compile[name] = time.perf_counter() - t0
        trace_roots[name] = (store, root)
    rows.append(("compile 300-row trace CNF (s)", {n: f"{t:.3f}" for n, t in trace_compile.items()}))

    query_medians = {}
    for name, backend in backends:
        store, root = trace_roots[name]
        times = bench_queries(backend, store, root, trace_vars)
        query_medians[name] = statistics.median(times) * 1e6
    rows.append(("condition+count median (us)", {n: f"{t:.1f}" for n, t in query_medians.items()}))

    for label, values in rows:
        print(f"{label:<34}" + "".join(f"{values[name]:>12}" for name, _ in backends))

    if _speedups is not None:
        speedup = compile_times["pure"] / compile_times["compiled"]
        qspeed = query_medians["pure"] / query_medians["compiled"]
        print(f"\ncompile speedup: {speedup:.2f}x   query speedup: {qspeed:.2f}x")


if __name__ == "__main__":
    main()
