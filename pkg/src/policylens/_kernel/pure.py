"""Pure-Python hot kernels: node construction, DPLL compilation, counting.

`policylens._kernel` falls back to this module when the compiled extension is
unavailable (or POLICYLENS_PURE=1). `_speedups.pyx` mirrors these functions
and must stay semantically identical; tests/test_kernels.py checks parity.

All functions operate directly on a store's parallel lists:
``kinds[i]`` is the node kind tag, ``payloads[i]`` the signed literal or the
sorted child-id tuple, ``masks[i]`` the cached variable bitmask, and ``index``
maps (kind, payload) to the node id for structural deduplication.
"""

KIND_TRUE = 0
KIND_FALSE = 1
KIND_LIT = 2
KIND_AND = 3
KIND_OR = 4

TRUE_ID = 0
FALSE_ID = 1

BACKEND = "pure"


def mk_lit(kinds, payloads, masks, index, slit):
    key = (KIND_LIT, slit)
    hit = index.get(key)
    if hit is not None:
        return hit
    node = len(kinds)
    kinds.append(KIND_LIT)
    payloads.append(slit)
    masks.append(1 << (abs(slit) - 1))
    index[key] = node
    return node


def mk_gate(kinds, payloads, masks, index, kind, children):
    """Canonical and/or constructor: constant absorption and identity
    elimination, same-kind flattening, dedup, sorted children, single-child
    collapse. Empty after simplification yields the identity constant."""
    if kind == KIND_AND:
        absorb, identity = FALSE_ID, TRUE_ID
    else:
        absorb, identity = TRUE_ID, FALSE_ID
    flat = []
    for c in children:
        if c == absorb:
            return absorb
        if c == identity:
            continue
        if kinds[c] == kind:
            flat.extend(payloads[c])
        else:
            flat.append(c)
    if not flat:
        return identity
    flat = sorted(set(flat))
    if len(flat) == 1:
        return flat[0]
    payload = tuple(flat)
    key = (kind, payload)
    hit = index.get(key)
    if hit is not None:
        return hit
    mask = 0
    for c in flat:
        mask |= masks[c]
    node = len(kinds)
    kinds.append(kind)
    payloads.append(payload)
    masks.append(mask)
    index[key] = node
    return node


def _choose_variable(clauses):
    """Most-occurring variable, ties to the lowest id. Clauses non-empty."""
    counts = {}
    for cl in clauses:
        for lit in cl:
            v = -lit if lit < 0 else lit
            counts[v] = counts.get(v, 0) + 1
    best_v = 0
    best_n = -1
    for v, n in counts.items():
        if n > best_n or (n == best_n and v < best_v):
            best_v = v
            best_n = n
    return best_v


def _split_components(clauses):
    """Partition clauses into connected components (shared-variable edges).

    Returns canonical components: each a sorted tuple of clauses, components
    sorted among themselves, so builds are deterministic and cache keys stable.
    """
    n = len(clauses)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    var_home = {}
    for idx, cl in enumerate(clauses):
        for lit in cl:
            v = -lit if lit < 0 else lit
            home = var_home.get(v)
            if home is None:
                var_home[v] = idx
            else:
                ri, rj = find(idx), find(home)
                if ri != rj:
                    parent[ri] = rj
    groups = {}
    for idx in range(n):
        groups.setdefault(find(idx), []).append(clauses[idx])
    comps = [tuple(sorted(g)) for g in groups.values()]
    comps.sort()
    return comps


def _assign(clauses, var, value):
    """Residual clauses after fixing one variable; empty tuples mark conflicts."""
    out = []
    for cl in clauses:
        keep = []
        satisfied = False
        for lit in cl:
            if lit == var or lit == -var:
                if (lit > 0) == value:
                    satisfied = True
                    break
            else:
                keep.append(lit)
        if not satisfied:
            out.append(tuple(keep))
    return out


def compile_kernel(kinds, payloads, masks, index, clauses, use_cache=True):
    """Exhaustive DPLL with unit propagation, component decomposition and
    component caching; appends d-DNNF nodes to the store and returns
    (root id, stats dict)."""
    stats = {"decisions": 0, "propagations": 0, "cache_hits": 0}
    cache = {}

    norm = []
    for cl in clauses:
        lits = set(cl)
        if any(-l in lits for l in lits):
            continue  # tautological clause is always satisfied
        if not lits:
            return FALSE_ID, stats
        norm.append(tuple(sorted(lits, key=abs)))

    def solve(work):
        assigned = {}
        while True:
            units = []
            for cl in work:
                if not cl:
                    return FALSE_ID
                if len(cl) == 1:
                    units.append(cl[0])
            if not units:
                break
            for u in units:
                v = -u if u < 0 else u
                val = u > 0
                prev = assigned.get(v)
                if prev is None:
                    assigned[v] = val
                    stats["propagations"] += 1
                elif prev != val:
                    return FALSE_ID
            nxt = []
            for cl in work:
                keep = []
                satisfied = False
                for lit in cl:
                    v = -lit if lit < 0 else lit
                    val = assigned.get(v)
                    if val is None:
                        keep.append(lit)
                    elif (lit > 0) == val:
                        satisfied = True
                        break
                if satisfied:
                    continue
                if not keep:
                    return FALSE_ID
                nxt.append(tuple(keep))
            work = nxt

        parts = [
            mk_lit(kinds, payloads, masks, index, v if val else -v)
            for v, val in sorted(assigned.items())
        ]
        for comp in _split_components(work) if work else ():
            node = cache.get(comp) if use_cache else None
            if node is None:
                v = _choose_variable(comp)
                stats["decisions"] += 1
                pos = solve(_assign(comp, v, True))
                neg = solve(_assign(comp, v, False))
                hi = mk_gate(kinds, payloads, masks, index, KIND_AND,
                             [mk_lit(kinds, payloads, masks, index, v), pos])
                lo = mk_gate(kinds, payloads, masks, index, KIND_AND,
                             [mk_lit(kinds, payloads, masks, index, -v), neg])
                node = mk_gate(kinds, payloads, masks, index, KIND_OR, [hi, lo])
                if use_cache:
                    cache[comp] = node
            else:
                stats["cache_hits"] += 1
            parts.append(node)
        if not parts:
            return TRUE_ID
        return mk_gate(kinds, payloads, masks, index, KIND_AND, parts)

    return solve(norm), stats


def _reachable_sorted(kinds, payloads, root):
    seen = {root}
    stack = [root]
    while stack:
        n = stack.pop()
        if kinds[n] >= KIND_AND:
            for c in payloads[n]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
    return sorted(seen)


def count_kernel(kinds, payloads, masks, root, free_mask, pos_mask, neg_mask):
    """Smoothed model count over the variables in free_mask, under the partial
    assignment pos_mask/neg_mask (leaf weights 0/1, assigned variables dropped
    from the smoothing correction). Single bottom-up pass; exact big ints."""
    value = {TRUE_ID: 1, FALSE_ID: 0}
    for n in _reachable_sorted(kinds, payloads, root):
        k = kinds[n]
        if k == KIND_LIT:
            slit = payloads[n]
            bit = 1 << ((-slit if slit < 0 else slit) - 1)
            if bit & pos_mask:
                value[n] = 1 if slit > 0 else 0
            elif bit & neg_mask:
                value[n] = 1 if slit < 0 else 0
            else:
                value[n] = 1
        elif k == KIND_AND:
            p = 1
            for c in payloads[n]:
                p *= value[c]
                if not p:
                    break
            value[n] = p
        elif k == KIND_OR:
            eff = masks[n] & free_mask
            s = 0
            for c in payloads[n]:
                gap = (eff & ~masks[c]).bit_count()
                s += value[c] << gap
            value[n] = s
    pad = (free_mask & ~masks[root]).bit_count()
    return value[root] << pad


def condition_kernel(kinds, payloads, masks, index, root, pos_mask, neg_mask):
    """Replace assigned literal leaves by constants and propagate through the
    canonical constructors; returns the new root id. Linear one-pass rebuild."""
    new = {TRUE_ID: TRUE_ID, FALSE_ID: FALSE_ID}
    for n in _reachable_sorted(kinds, payloads, root):
        k = kinds[n]
        if k == KIND_LIT:
            slit = payloads[n]
            bit = 1 << ((-slit if slit < 0 else slit) - 1)
            if bit & pos_mask:
                new[n] = TRUE_ID if slit > 0 else FALSE_ID
            elif bit & neg_mask:
                new[n] = TRUE_ID if slit < 0 else FALSE_ID
            else:
                new[n] = n
        elif k >= KIND_AND:
            kids = [new[c] for c in payloads[n]]
            if tuple(kids) == payloads[n]:
                new[n] = n
            else:
                new[n] = mk_gate(kinds, payloads, masks, index, k, kids)
    return new[root]
