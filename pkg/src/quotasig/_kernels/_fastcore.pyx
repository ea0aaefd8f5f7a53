# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid-search kernel.

Mirrors `quotasig._kernels.pure.grid_search` operation for operation; see
that module for the semantics. Capacities and exported values are 64-bit,
cost arithmetic and comparisons run in 128-bit, and the Python wrapper
only dispatches here after proving that those widths cannot overflow for
the given inputs.
"""

from libc.stdlib cimport calloc, free
from itertools import permutations

cdef extern from *:
    ctypedef long long i128 "__int128"

ctypedef long long ll

cdef ll I64_GUARD = <ll>1 << 62


cdef inline ll _gcd(ll a, ll b) noexcept nogil:
    cdef ll t
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef struct Mcf:
    # Static buffers for the per-scheme min-cost flow.
    int nodes
    int nedges
    int* head
    int* nxt
    int* to
    ll* cap
    i128* cst
    i128* dist
    unsigned char* reached
    int* par


cdef int _mcf_run(Mcf* g, int m, ll* lam_u, unsigned char* reach,
                  i128* cost, ll* cap_a, ll* lb, ll U, ll total_lb,
                  ll* flows) noexcept nogil:
    """Build and solve one flow problem; fills `flows` (m*m). Returns 0 on
    success, -1 if no feasible flow exists."""
    cdef int nodes = 2 * m + 2
    cdef int sink = 2 * m + 1
    cdef int s, j, u, v, e, i, target, passes
    cdef ll amt, supply
    cdef i128 nd, best

    g.nodes = nodes
    g.nedges = 0
    for u in range(nodes):
        g.head[u] = -1

    # flow edge ids for (s, j) are recorded positionally: the edge pair for
    # signal s, action j is created in a fixed order reproduced on readout.
    cdef int fe_base[64]
    for s in range(m):
        if not reach[s]:
            continue
        _add_edge(g, 0, 1 + s, lam_u[s], 0)
        for j in range(m):
            fe_base[s * m + j] = g.nedges
            _add_edge(g, 1 + s, 1 + m + j, U, cost[s * m + j])
    for j in range(m):
        _add_edge(g, 1 + m + j, sink, cap_a[j] - lb[j], 0)

    cdef ll deficit[16]
    for j in range(m):
        deficit[j] = lb[j]
    deficit[m] = U - total_lb

    supply = U
    while supply > 0:
        for u in range(nodes):
            g.reached[u] = 0
            g.par[u] = -1
        g.dist[0] = 0
        g.reached[0] = 1
        passes = 0
        while True:
            i = 0
            for u in range(nodes):
                if not g.reached[u]:
                    continue
                e = g.head[u]
                while e != -1:
                    if g.cap[e] > 0:
                        v = g.to[e]
                        nd = g.dist[u] + g.cst[e]
                        if (not g.reached[v]) or nd < g.dist[v]:
                            g.dist[v] = nd
                            g.reached[v] = 1
                            g.par[v] = e
                            i = 1
                    e = g.nxt[e]
            if not i:
                break
            passes += 1
            if passes > nodes + 2:
                return -1  # negative cycle: cannot happen for valid input
        target = -1
        for v in range(nodes):
            j = -1
            if m + 1 <= v and v <= 2 * m:
                j = v - m - 1
            elif v == sink:
                j = m
            if j >= 0 and deficit[j] > 0 and g.reached[v]:
                if target == -1 or g.dist[v] < best:
                    best = g.dist[v]
                    target = v
        if target == -1:
            return -1
        if target == sink:
            j = m
        else:
            j = target - m - 1
        amt = supply
        if deficit[j] < amt:
            amt = deficit[j]
        v = target
        while v != 0:
            e = g.par[v]
            if g.cap[e] < amt:
                amt = g.cap[e]
            v = g.to[e ^ 1]
        v = target
        while v != 0:
            e = g.par[v]
            g.cap[e] -= amt
            g.cap[e ^ 1] += amt
            v = g.to[e ^ 1]
        supply -= amt
        deficit[j] -= amt

    for s in range(m):
        for j in range(m):
            flows[s * m + j] = 0
        if reach[s]:
            for j in range(m):
                e = fe_base[s * m + j]
                flows[s * m + j] = g.cap[e ^ 1]
    return 0


cdef inline void _add_edge(Mcf* g, int u, int v, ll c, i128 w) noexcept nogil:
    cdef int e = g.nedges
    g.nxt[e] = g.head[u]
    g.head[u] = e
    g.to[e] = v
    g.cap[e] = c
    g.cst[e] = w
    g.nxt[e + 1] = g.head[v]
    g.head[v] = e + 1
    g.to[e + 1] = u
    g.cap[e + 1] = 0
    g.cst[e + 1] = -w
    g.nedges = e + 2


def grid_search(int n, int m, rows_per_state, int K, P, ll Dp,
                UR, US, Lb, Ub, ll U, object delta_num, object delta_den,
                ll DS, bint symmetric):
    """Compiled counterpart of pure.grid_search; same inputs and output."""
    if m > 8 or n > 8:
        raise ValueError("kernel supports at most 8 states/actions")
    cdef ll T2 = Dp * K
    cdef ll scale = U // T2
    cdef int i, s, j, c, e
    cdef Py_ssize_t idx

    sizes_py = [len(r) for r in rows_per_state]
    cdef int max_rows = max(sizes_py)
    cdef long long total_combos = 1
    for i in range(n):
        total_combos *= sizes_py[i]

    # Flattened row data and per-(state, row) contributions.
    cdef int* sizes = <int*>calloc(n, sizeof(int))
    cdef int* rowdat = <int*>calloc(n * max_rows * m, sizeof(int))
    cdef ll* conlam = <ll*>calloc(n * max_rows * m, sizeof(ll))
    cdef ll* conr = <ll*>calloc(n * max_rows * m * m, sizeof(ll))
    cdef ll* cons = <ll*>calloc(n * max_rows * m * m, sizeof(ll))
    cdef ll* p_num = <ll*>calloc(n, sizeof(ll))
    cdef ll* ur = <ll*>calloc(n * m, sizeof(ll))
    cdef ll* us = <ll*>calloc(n * m, sizeof(ll))
    cdef ll* lbv = <ll*>calloc(m, sizeof(ll))
    cdef ll* ubv = <ll*>calloc(m, sizeof(ll))

    # Per-evaluated-scheme results.
    cdef ll* res_or = <ll*>calloc(total_combos, sizeof(ll))
    cdef ll* res_os = <ll*>calloc(total_combos, sizeof(ll))
    cdef ll* res_d = <ll*>calloc(total_combos, sizeof(ll))
    cdef int* res_idx = <int*>calloc(total_combos * n, sizeof(int))

    cdef Mcf g
    cdef int nodes = 2 * m + 2
    cdef int maxedges = 2 * (m + m * m + m)
    g.head = <int*>calloc(nodes, sizeof(int))
    g.nxt = <int*>calloc(maxedges, sizeof(int))
    g.to = <int*>calloc(maxedges, sizeof(int))
    g.cap = <ll*>calloc(maxedges, sizeof(ll))
    g.cst = <i128*>calloc(maxedges, sizeof(i128))
    g.dist = <i128*>calloc(nodes, sizeof(i128))
    g.reached = <unsigned char*>calloc(nodes, sizeof(unsigned char))
    g.par = <int*>calloc(nodes, sizeof(int))

    perms_py = [p for p in permutations(range(m)) if p != tuple(range(m))]
    cdef int nperms = len(perms_py)
    cdef int* perms = <int*>calloc(max(nperms, 1) * m, sizeof(int))
    for i in range(nperms):
        for j in range(m):
            perms[i * m + j] = perms_py[i][j]

    try:
        for i in range(n):
            sizes[i] = sizes_py[i]
            p_num[i] = P[i]
            for j in range(m):
                ur[i * m + j] = UR[i][j]
                us[i * m + j] = US[i][j]
        for j in range(m):
            lbv[j] = Lb[j]
            ubv[j] = Ub[j]
        for i in range(n):
            rows_i = rows_per_state[i]
            for c in range(sizes[i]):
                row = rows_i[c]
                for s in range(m):
                    rowdat[(i * max_rows + c) * m + s] = row[s]
                    conlam[(i * max_rows + c) * m + s] = p_num[i] * row[s]
                for s in range(m):
                    for j in range(m):
                        conr[((i * max_rows + c) * m + s) * m + j] = (
                            p_num[i] * row[s] * ur[i * m + j])
                        cons[((i * max_rows + c) * m + s) * m + j] = (
                            p_num[i] * row[s] * us[i * m + j])

        stats = _enumerate(n, m, &g, sizes, max_rows, rowdat, conlam, conr,
                           cons, lbv, ubv, U, T2, scale, symmetric, nperms,
                           perms, res_or, res_os, res_d, res_idx)
        scheme_count, nev = stats
        if nev == 0:
            return {"status": "empty", "scheme_count": scheme_count,
                    "evaluated": 0}

        best = _select(nev, res_or, res_os, res_d, delta_num, delta_den, DS)
        bi, os_star_i = best
        rows_out = []
        for i in range(n):
            c = res_idx[bi * n + i]
            rows_out.append(tuple(
                rowdat[(i * max_rows + c) * m + s] for s in range(m)))
        return {
            "status": "ok",
            "best_rows": tuple(rows_out),
            "best_recv": (res_or[bi], res_d[bi]),
            "best_send": (res_os[bi], res_d[bi]),
            "max_send": (res_os[os_star_i], res_d[os_star_i]),
            "scheme_count": scheme_count,
            "evaluated": nev,
        }
    finally:
        free(sizes); free(rowdat); free(conlam); free(conr); free(cons)
        free(p_num); free(ur); free(us); free(lbv); free(ubv)
        free(res_or); free(res_os); free(res_d); free(res_idx)
        free(g.head); free(g.nxt); free(g.to); free(g.cap); free(g.cst)
        free(g.dist); free(g.reached); free(g.par)
        free(perms)


cdef _enumerate(int n, int m, Mcf* g, int* sizes, int max_rows, int* rowdat,
                ll* conlam, ll* conr, ll* cons, ll* lbv, ll* ubv, ll U,
                ll T2, ll scale, bint symmetric, int nperms, int* perms,
                ll* res_or, ll* res_os, ll* res_d, int* res_idx):
    cdef long long scheme_count = 0, nev = 0
    cdef int idx[8]
    cdef int i, s, j, k, c, cmp_, pbase
    cdef ll lam[8]
    cdef ll lam_u[8]
    cdef ll gr[64]
    cdef ll gs[64]
    cdef i128 cr[64]
    cdef i128 cs[64]
    cdef i128 cost[64]
    cdef ll flows[64]
    cdef ll cap_a[8]
    cdef unsigned char reach[8]
    cdef ll lc, f, total_lb, total_ub, o_r_cap
    cdef i128 big, maxcs, a
    cdef i128 o_r, o_s
    cdef bint canon, done
    cdef int va, vb

    total_lb = 0
    total_ub = 0
    for j in range(m):
        total_lb += lbv[j]
        total_ub += ubv[j]
        cap_a[j] = ubv[j]
        if lbv[j] > ubv[j]:
            return scheme_count, 0
    if total_lb > U or total_ub < U:
        return scheme_count, 0

    for i in range(n):
        idx[i] = 0
    done = False
    while not done:
        scheme_count += 1
        # Canonical check: lex-least among column permutations.
        canon = True
        if symmetric:
            for k in range(nperms):
                pbase = k * m
                cmp_ = 0
                for i in range(n):
                    c = idx[i]
                    for s in range(m):
                        va = rowdat[(i * max_rows + c) * m + perms[pbase + s]]
                        vb = rowdat[(i * max_rows + c) * m + s]
                        if va != vb:
                            cmp_ = -1 if va < vb else 1
                            break
                    if cmp_ != 0:
                        break
                if cmp_ < 0:
                    canon = False
                    break
        if canon:
            for s in range(m):
                lam[s] = 0
                for j in range(m):
                    gr[s * m + j] = 0
                    gs[s * m + j] = 0
            for i in range(n):
                c = (i * max_rows + idx[i]) * m
                for s in range(m):
                    lam[s] += conlam[c + s]
                    for j in range(m):
                        gr[s * m + j] += conr[(c + s) * m + j]
                        gs[s * m + j] += cons[(c + s) * m + j]
            lc = 1
            for s in range(m):
                reach[s] = 1 if lam[s] > 0 else 0
                if reach[s]:
                    lc = lc // _gcd(lc, lam[s]) * lam[s]
            maxcs = 0
            for s in range(m):
                if not reach[s]:
                    continue
                f = lc // lam[s]
                for j in range(m):
                    cr[s * m + j] = <i128>gr[s * m + j] * f
                    cs[s * m + j] = <i128>gs[s * m + j] * f
                    a = cs[s * m + j]
                    if a < 0:
                        a = -a
                    if a > maxcs:
                        maxcs = a
                lam_u[s] = lam[s] * scale
            big = 2 * <i128>U * maxcs + 1
            for s in range(m):
                if reach[s]:
                    for j in range(m):
                        cost[s * m + j] = -(cr[s * m + j] * big + cs[s * m + j])
            if _mcf_run(g, m, lam_u, reach, cost, cap_a, lbv, U,
                        total_lb, flows) == 0:
                o_r = 0
                o_s = 0
                for s in range(m):
                    if not reach[s]:
                        continue
                    for j in range(m):
                        if flows[s * m + j]:
                            o_r += flows[s * m + j] * cr[s * m + j]
                            o_s += flows[s * m + j] * cs[s * m + j]
                if (o_r > I64_GUARD or o_r < -I64_GUARD or
                        o_s > I64_GUARD or o_s < -I64_GUARD or
                        <i128>U * lc > I64_GUARD):
                    raise OverflowError("kernel value outside 64-bit range")
                res_or[nev] = <ll>o_r
                res_os[nev] = <ll>o_s
                res_d[nev] = U * lc
                for i in range(n):
                    res_idx[nev * n + i] = idx[i]
                nev += 1
        # Odometer step.
        i = n - 1
        while i >= 0:
            idx[i] += 1
            if idx[i] < sizes[i]:
                break
            idx[i] = 0
            i -= 1
        if i < 0:
            done = True
    return scheme_count, nev


cdef _select(long long nev, ll* res_or, ll* res_os, ll* res_d,
             object delta_num, object delta_den, ll DS):
    cdef long long i, bs = 0, best = -1
    cdef ll dn, dd
    dn = delta_num
    dd = delta_den
    for i in range(1, nev):
        if (<i128>res_os[i] * res_d[bs]) > (<i128>res_os[bs] * res_d[i]):
            bs = i
    cdef i128 os_star = res_os[bs]
    cdef i128 d_star = res_d[bs]
    cdef i128 lhs, rhs
    for i in range(nev):
        # In band: OS/(D*DS) >= OS*/(D**DS) - dn/dd
        lhs = <i128>res_os[i] * d_star * dd
        rhs = os_star * res_d[i] * dd - <i128>dn * DS * res_d[i] * d_star
        if lhs < rhs:
            continue
        if best == -1 or (<i128>res_or[i] * res_d[best]) > (<i128>res_or[best] * res_d[i]):
            best = i
    return best, bs
