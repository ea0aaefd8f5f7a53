"""Pure-Python grid-search kernel.

Reference implementation of the hot loop shared with the compiled
extension: enumerate discretized signaling schemes and, for each, solve
the receiver's quota-constrained lexicographic best response exactly.

All arithmetic is over plain Python integers. Every probability is
expressed in units of 1/U (U a multiple of prior_den * K), utilities are
pre-scaled to integers, and the per-scheme receiver problem becomes a
tiny min-cost-flow with integer capacities and lexicographically composed
integer costs, so vertices and optima are exact.

The compiled twin (`_fastcore.pyx`) mirrors this module operation for
operation; `grid_search` here is the semantic contract both must satisfy.
"""

from __future__ import annotations

from itertools import permutations
from math import gcd

INF = None  # distance "infinity" marker in the path search


def compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _is_canonical(rows, perms) -> bool:
    """Is this matrix the lex-least among its column permutations?"""
    for perm in perms:
        for row in rows:
            permuted = tuple(row[p] for p in perm)
            if permuted < row:
                break  # permuted matrix is smaller: not canonical
            if permuted > row:
                break  # permuted matrix is larger: this perm can't beat us
        else:
            continue
        if permuted < row:
            return False
    return True


def _min_cost_flow(m, reachable, lam_u, cost, cap_a, need_a, U, total_lb):
    """Exact min-cost flow for one scheme's receiver problem.

    Nodes: 0 source, 1..m signals, m+1..2m actions, 2m+1 sink. Quota lower
    bounds are turned into per-action deficits (`need_a`); upper bounds cap
    the action->sink edges (`cap_a`). Successive shortest augmenting paths
    via Bellman-Ford; exactness needs no potentials at this size.

    Returns the signal->action flow matrix, or None if no feasible flow.
    """
    nodes = 2 * m + 2
    sink = 2 * m + 1
    # Edge arrays; edge e and e^1 are a residual pair.
    head = [-1] * nodes
    nxt, to, cap, cst = [], [], [], []

    def add_edge(u, v, c, w):
        for a, b, cc, ww in ((u, v, c, w), (v, u, 0, -w)):
            nxt.append(head[a])
            head[a] = len(to)
            to.append(b)
            cap.append(cc)
            cst.append(ww)

    flow_edge = {}
    for s in reachable:
        add_edge(0, 1 + s, lam_u[s], 0)
        for j in range(m):
            flow_edge[(s, j)] = len(to)
            add_edge(1 + s, 1 + m + j, U, cost[s][j])
    for j in range(m):
        add_edge(1 + m + j, sink, cap_a[j], 0)

    deficit = list(need_a) + [U - total_lb]  # actions 0..m-1, then sink

    def node_deficit(v):
        if m + 1 <= v <= 2 * m:
            return deficit[v - m - 1]
        if v == sink:
            return deficit[m]
        return 0

    supply = U
    while supply > 0:
        dist = [INF] * nodes
        par = [-1] * nodes
        dist[0] = 0
        changed = True
        while changed:  # Bellman-Ford; the graph is tiny and cycle-safe
            changed = False
            for u in range(nodes):
                du = dist[u]
                if du is INF:
                    continue
                e = head[u]
                while e != -1:
                    if cap[e] > 0:
                        v = to[e]
                        nd = du + cst[e]
                        if dist[v] is INF or nd < dist[v]:
                            dist[v] = nd
                            par[v] = e
                            changed = True
                    e = nxt[e]
        target = -1
        best = None
        for v in range(nodes):
            if node_deficit(v) > 0 and dist[v] is not INF:
                if best is None or dist[v] < best:
                    best = dist[v]
                    target = v
        if target == -1:
            return None
        amt = min(supply, node_deficit(target))
        v = target
        while v != 0:
            e = par[v]
            amt = min(amt, cap[e])
            v = to[e ^ 1]
        v = target
        while v != 0:
            e = par[v]
            cap[e] -= amt
            cap[e ^ 1] += amt
            v = to[e ^ 1]
        supply -= amt
        if target == sink:
            deficit[m] -= amt
        else:
            deficit[target - m - 1] -= amt

    flows = [[0] * m for _ in range(m)]
    for (s, j), e in flow_edge.items():
        flows[s][j] = cap[e ^ 1]
    return flows


def solve_scheme(rows, n, m, P, T2, UR, US, Lb, Ub, U):
    """Receiver-then-sender optimum for one scheme.

    Returns (OR, OS, D) with receiver EU = OR/(D*DR), sender EU =
    OS/(D*DS) for the caller's utility scales DR, DS; or None when the
    quota polytope is empty.
    """
    scale = U // T2
    lam = [0] * m
    for i in range(n):
        pi = P[i]
        row = rows[i]
        for s in range(m):
            lam[s] += pi * row[s]
    reachable = [s for s in range(m) if lam[s] > 0]

    g_r = [[0] * m for _ in range(m)]
    g_s = [[0] * m for _ in range(m)]
    for i in range(n):
        pi = P[i]
        row = rows[i]
        ur = UR[i]
        us = US[i]
        for s in range(m):
            w = pi * row[s]
            if w == 0:
                continue
            gr = g_r[s]
            gs = g_s[s]
            for j in range(m):
                gr[j] += w * ur[j]
                gs[j] += w * us[j]

    lc = 1
    for s in reachable:
        lc = _lcm(lc, lam[s])
    c_r = [[0] * m for _ in range(m)]
    c_s = [[0] * m for _ in range(m)]
    max_cs = 0
    for s in reachable:
        f = lc // lam[s]
        for j in range(m):
            c_r[s][j] = g_r[s][j] * f
            c_s[s][j] = g_s[s][j] * f
            if abs(c_s[s][j]) > max_cs:
                max_cs = abs(c_s[s][j])
    big = 2 * U * max_cs + 1

    total_lb = sum(Lb)
    if total_lb > U or sum(Ub) < U or any(l > u for l, u in zip(Lb, Ub)):
        return None
    cost = [
        [-(c_r[s][j] * big + c_s[s][j]) for j in range(m)] for s in range(m)
    ]
    lam_u = [l * scale for l in lam]
    cap_a = [Ub[j] - Lb[j] for j in range(m)]
    flows = _min_cost_flow(m, reachable, lam_u, cost, cap_a, list(Lb), U, total_lb)
    if flows is None:
        return None
    o_r = o_s = 0
    for s in reachable:
        for j in range(m):
            x = flows[s][j]
            if x:
                o_r += x * c_r[s][j]
                o_s += x * c_s[s][j]
    return o_r, o_s, U * lc


def grid_search(
    n,
    m,
    rows_per_state,
    K,
    P,
    Dp,
    UR,
    US,
    Lb,
    Ub,
    U,
    delta_num,
    delta_den,
    DS,
    symmetric,
):
    """Enumerate schemes, evaluate each, select the band-constrained best.

    Selection: receiver-EU maximum among schemes whose sender EU is within
    delta of the grid maximum sender EU; ties go to the lexicographically
    smallest scheme matrix. With `symmetric` the enumeration skips
    non-canonical column permutations (values are permutation-invariant
    and the canonical representative is the lex-least member).
    """
    T2 = Dp * K
    perms = [p for p in permutations(range(m)) if p != tuple(range(m))]

    entries = []  # (rows, OR, OS, D)
    scheme_count = 0
    for combo in _product_rows(rows_per_state):
        scheme_count += 1
        if symmetric and not _is_canonical(combo, perms):
            continue
        res = solve_scheme(combo, n, m, P, T2, UR, US, Lb, Ub, U)
        if res is None:
            continue
        entries.append((combo, res[0], res[1], res[2]))

    if not entries:
        return {"status": "empty", "scheme_count": scheme_count, "evaluated": 0}

    # Grid maximum sender EU (first maximizer kept).
    bs = 0
    for i in range(1, len(entries)):
        if entries[i][2] * entries[bs][3] > entries[bs][2] * entries[i][3]:
            bs = i
    os_star, d_star = entries[bs][2], entries[bs][3]

    best = -1
    for i, (_rows, o_r, o_s, d) in enumerate(entries):
        # In band: OS/(D*DS) >= OS*/(D**DS) - delta
        if o_s * d_star * delta_den < os_star * d * delta_den - delta_num * DS * d * d_star:
            continue
        if best == -1 or o_r * entries[best][3] > entries[best][1] * d:
            best = i

    rows, o_r, o_s, d = entries[best]
    return {
        "status": "ok",
        "best_rows": rows,
        "best_recv": (o_r, d),
        "best_send": (o_s, d),
        "max_send": (os_star, d_star),
        "scheme_count": scheme_count,
        "evaluated": len(entries),
    }


def _product_rows(rows_per_state):
    """Cartesian product of per-state row choices, lexicographic order."""
    n = len(rows_per_state)
    idx = [0] * n
    sizes = [len(r) for r in rows_per_state]
    if any(s == 0 for s in sizes):
        return
    while True:
        yield tuple(rows_per_state[i][idx[i]] for i in range(n))
        i = n - 1
        while i >= 0:
            idx[i] += 1
            if idx[i] < sizes[i]:
                break
            idx[i] = 0
            i -= 1
        if i < 0:
            return
