# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Cython build of the hot kernels; semantics must match pure.py exactly.

Node ids and occurrence counts are C longs; variable masks and model counts
stay Python ints (they are arbitrary-precision bitmasks / counters).
"""

cdef enum:
    KIND_TRUE = 0
    KIND_FALSE = 1
    KIND_LIT = 2
    KIND_AND = 3
    KIND_OR = 4

cdef enum:
    TRUE_ID = 0
    FALSE_ID = 1

BACKEND = "compiled"


cpdef long mk_lit(list kinds, list payloads, list masks, dict index, long slit):
    # Masks are arbitrary-precision Python ints: shift as objects, never in C.
    cdef long v = -slit if slit < 0 else slit
    key = (KIND_LIT, slit)
    hit = index.get(key)
    if hit is not None:
        return <long> hit
    cdef long node = len(kinds)
    mask = (<object> 1) << (v - 1)
    kinds.append(KIND_LIT)
    payloads.append(slit)
    masks.append(mask)
    index[key] = node
    return node


cpdef long mk_gate(list kinds, list payloads, list masks, dict index, long kind, children):
    cdef long absorb, identity, c
    if kind == KIND_AND:
        absorb = FALSE_ID
        identity = TRUE_ID
    else:
        absorb = TRUE_ID
        identity = FALSE_ID
    cdef list flat = []
    for c in children:
        if c == absorb:
            return absorb
        if c == identity:
            continue
        if <long> kinds[c] == kind:
            flat.extend(<tuple> payloads[c])
        else:
            flat.append(c)
    if not flat:
        return identity
    flat = sorted(set(flat))
    if len(flat) == 1:
        return <long> flat[0]
    payload = tuple(flat)
    key = (kind, payload)
    hit = index.get(key)
    if hit is not None:
        return <long> hit
    mask = 0
    for c in flat:
        mask = mask | <object> masks[c]
    cdef long node = len(kinds)
    kinds.append(kind)
    payloads.append(payload)
    masks.append(mask)
    index[key] = node
    return node


cdef long _choose_variable(tuple clauses):
    cdef dict counts = {}
    cdef long v, n, best_v, best_n
    cdef long lit
    for cl in clauses:
        for lit in <tuple> cl:
            v = -lit if lit < 0 else lit
            counts[v] = <long> counts.get(v, 0) + 1
    best_v = 0
    best_n = -1
    for item in counts.items():
        v = <long> (<tuple> item)[0]
        n = <long> (<tuple> item)[1]
        if n > best_n or (n == best_n and v < best_v):
            best_v = v
            best_n = n
    return best_v


cdef list _split_components(list clauses):
    cdef long n = len(clauses)
    cdef list parent = list(range(n))
    cdef dict var_home = {}
    cdef long idx, v, ri, rj, lit

    for idx in range(n):
        for lit in <tuple> clauses[idx]:
            v = -lit if lit < 0 else lit
            home = var_home.get(v)
            if home is None:
                var_home[v] = idx
            else:
                ri = idx
                while <long> parent[ri] != ri:
                    parent[ri] = parent[<long> parent[ri]]
                    ri = <long> parent[ri]
                rj = <long> home
                while <long> parent[rj] != rj:
                    parent[rj] = parent[<long> parent[rj]]
                    rj = <long> parent[rj]
                if ri != rj:
                    parent[ri] = rj
    cdef dict groups = {}
    cdef long root
    for idx in range(n):
        root = idx
        while <long> parent[root] != root:
            parent[root] = parent[<long> parent[root]]
            root = <long> parent[root]
        if root in groups:
            (<list> groups[root]).append(clauses[idx])
        else:
            groups[root] = [clauses[idx]]
    cdef list comps = [tuple(sorted(g)) for g in groups.values()]
    comps.sort()
    return comps


cdef list _assign(tuple comp, long var, bint value):
    cdef list out = []
    cdef list keep
    cdef bint satisfied
    cdef long lit
    for cl in comp:
        keep = []
        satisfied = False
        for lit in <tuple> cl:
            if lit == var or lit == -var:
                if (lit > 0) == value:
                    satisfied = True
                    break
            else:
                keep.append(lit)
        if not satisfied:
            out.append(tuple(keep))
    return out


def compile_kernel(list kinds, list payloads, list masks, dict index, clauses,
                   bint use_cache=True):
    """Exhaustive DPLL with unit propagation, component decomposition and
    component caching; appends d-DNNF nodes to the store and returns
    (root id, stats dict)."""
    stats = {"decisions": 0, "propagations": 0, "cache_hits": 0}
    cdef dict cache = {}
    cdef long decisions = 0, propagations = 0, cache_hits = 0

    cdef list norm = []
    cdef long l
    for cl in clauses:
        lits = set(cl)
        tauto = False
        for l in lits:
            if -l in lits:
                tauto = True
                break
        if tauto:
            continue
        if not lits:
            return FALSE_ID, stats
        norm.append(tuple(sorted(lits, key=abs)))

    def solve(list work):
        nonlocal decisions, propagations, cache_hits
        cdef dict assigned = {}
        cdef list units, nxt, keep
        cdef long u, v, lit, pos, neg, hi, lo, node
        cdef bint val, satisfied
        while True:
            units = []
            for cl in work:
                if not <tuple> cl:
                    return FALSE_ID
                if len(<tuple> cl) == 1:
                    units.append((<tuple> cl)[0])
            if not units:
                break
            for u in units:
                v = -u if u < 0 else u
                val = u > 0
                prev = assigned.get(v)
                if prev is None:
                    assigned[v] = val
                    propagations += 1
                elif <bint> prev != val:
                    return FALSE_ID
            nxt = []
            for cl in work:
                keep = []
                satisfied = False
                for lit in <tuple> cl:
                    v = -lit if lit < 0 else lit
                    prev = assigned.get(v)
                    if prev is None:
                        keep.append(lit)
                    elif (lit > 0) == <bint> prev:
                        satisfied = True
                        break
                if satisfied:
                    continue
                if not keep:
                    return FALSE_ID
                nxt.append(tuple(keep))
            work = nxt

        cdef list parts = []
        for v, bval in sorted(assigned.items()):
            parts.append(mk_lit(kinds, payloads, masks, index, v if bval else -v))
        if work:
            for comp in _split_components(work):
                cached = cache.get(comp) if use_cache else None
                if cached is None:
                    v = _choose_variable(<tuple> comp)
                    decisions += 1
                    pos = solve(_assign(<tuple> comp, v, True))
                    neg = solve(_assign(<tuple> comp, v, False))
                    hi = mk_gate(kinds, payloads, masks, index, KIND_AND,
                                 [mk_lit(kinds, payloads, masks, index, v), pos])
                    lo = mk_gate(kinds, payloads, masks, index, KIND_AND,
                                 [mk_lit(kinds, payloads, masks, index, -v), neg])
                    node = mk_gate(kinds, payloads, masks, index, KIND_OR, [hi, lo])
                    if use_cache:
                        cache[comp] = node
                else:
                    cache_hits += 1
                    node = <long> cached
                parts.append(node)
        if not parts:
            return TRUE_ID
        return mk_gate(kinds, payloads, masks, index, KIND_AND, parts)

    root = solve(norm)
    stats["decisions"] = decisions
    stats["propagations"] = propagations
    stats["cache_hits"] = cache_hits
    return root, stats


cdef list _reachable_sorted(list kinds, list payloads, long root):
    cdef set seen = {root}
    cdef list stack = [root]
    cdef long n, c
    while stack:
        n = <long> stack.pop()
        if <long> kinds[n] >= KIND_AND:
            for c in <tuple> payloads[n]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
    return sorted(seen)


def count_kernel(list kinds, list payloads, list masks, long root,
                 free_mask, pos_mask, neg_mask):
    """Smoothed model count over free_mask under the partial assignment
    pos/neg; single bottom-up pass, exact big-int arithmetic."""
    cdef dict value = {TRUE_ID: 1, FALSE_ID: 0}
    cdef long n, k, slit, c, gap
    for n in _reachable_sorted(kinds, payloads, root):
        k = <long> kinds[n]
        if k == KIND_LIT:
            slit = <long> payloads[n]
            bit = (<object> 1) << ((-slit if slit < 0 else slit) - 1)
            if bit & pos_mask:
                value[n] = 1 if slit > 0 else 0
            elif bit & neg_mask:
                value[n] = 1 if slit < 0 else 0
            else:
                value[n] = 1
        elif k == KIND_AND:
            p = 1
            for c in <tuple> payloads[n]:
                p = p * <object> value[c]
                if not p:
                    break
            value[n] = p
        elif k == KIND_OR:
            eff = <object> masks[n] & free_mask
            s = 0
            for c in <tuple> payloads[n]:
                gap = (eff & ~<object> masks[c]).bit_count()
                s = s + (<object> value[c] << gap)
            value[n] = s
    pad = (free_mask & ~<object> masks[root]).bit_count()
    return <object> value[root] << pad


def condition_kernel(list kinds, list payloads, list masks, dict index, long root,
                     pos_mask, neg_mask):
    """Replace assigned literal leaves by constants and propagate through the
    canonical constructors; returns the new root id."""
    cdef dict new = {TRUE_ID: TRUE_ID, FALSE_ID: FALSE_ID}
    cdef long n, k, slit
    cdef list kids
    cdef bint changed
    for n in _reachable_sorted(kinds, payloads, root):
        k = <long> kinds[n]
        if k == KIND_LIT:
            slit = <long> payloads[n]
            bit = (<object> 1) << ((-slit if slit < 0 else slit) - 1)
            if bit & pos_mask:
                new[n] = TRUE_ID if slit > 0 else FALSE_ID
            elif bit & neg_mask:
                new[n] = TRUE_ID if slit < 0 else FALSE_ID
            else:
                new[n] = n
        elif k >= KIND_AND:
            kids = [new[c] for c in <tuple> payloads[n]]
            if tuple(kids) == <tuple> payloads[n]:
                new[n] = n
            else:
                new[n] = mk_gate(kinds, payloads, masks, index, k, kids)
    return new[root]
