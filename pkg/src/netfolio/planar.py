"""Linear-time planarity testing.

Implements the left-right (de Fraysseix / Rosenstiehl) planarity criterion as a
check-only test: no embedding is produced. The hot loop is compiled with numba
because PMFG construction calls the test thousands of times per matrix. The
kernel operates on plain int64 edge arrays so it can be reused incrementally
without rebuilding graph objects.
"""
import numpy as np
from numba import njit

_NONE = -1


@njit(cache=True)
def planar_check_kernel(n, eu, ev):
    """Planarity of the simple undirected graph on ``n`` vertices.

    ``eu``/``ev`` are parallel int64 arrays holding the endpoints of each edge.
    The input must be simple (no self-loops, no duplicate edges); the caller is
    responsible for that invariant.
    """
    m = eu.shape[0]
    if n <= 4 or m <= 8:
        # K5 needs 10 edges and K3,3 needs 9; anything smaller is planar.
        return True
    if m > 3 * n - 6:
        return False

    nd = 2 * m
    esrc = np.empty(nd, np.int64)
    edst = np.empty(nd, np.int64)
    for k in range(m):
        esrc[2 * k] = eu[k]
        edst[2 * k] = ev[k]
        esrc[2 * k + 1] = ev[k]
        edst[2 * k + 1] = eu[k]

    # CSR adjacency over directed edge ids, keyed by source vertex
    adj_start = np.zeros(n + 1, np.int64)
    for e in range(nd):
        adj_start[esrc[e] + 1] += 1
    for v in range(n):
        adj_start[v + 1] += adj_start[v]
    fill = adj_start[:n].copy()
    adj_edge = np.empty(nd, np.int64)
    for e in range(nd):
        s = esrc[e]
        adj_edge[fill[s]] = e
        fill[s] += 1

    # ---- phase 1: orientation DFS (heights, lowpoints, nesting depth) ----
    height = np.full(n, _NONE, np.int64)
    parent_edge = np.full(n, _NONE, np.int64)
    oriented_dir = np.full(m, _NONE, np.int64)  # directed id chosen per edge
    lowpt = np.zeros(nd, np.int64)
    lowpt2 = np.zeros(nd, np.int64)
    nesting_depth = np.zeros(nd, np.int64)
    skip_init = np.zeros(nd, np.uint8)
    ind = adj_start[:n].copy()
    dfs_stack = np.empty(2 * n + 2, np.int64)

    for root in range(n):
        if height[root] != _NONE:
            continue
        height[root] = 0
        sp = 0
        dfs_stack[sp] = root
        sp += 1
        while sp > 0:
            sp -= 1
            v = dfs_stack[sp]
            e = parent_edge[v]
            while ind[v] < adj_start[v + 1]:
                ei = adj_edge[ind[v]]
                w = edst[ei]
                k = ei >> 1
                if skip_init[ei] == 0:
                    if oriented_dir[k] != _NONE:
                        ind[v] += 1
                        continue
                    oriented_dir[k] = ei
                    lowpt[ei] = height[v]
                    lowpt2[ei] = height[v]
                    if height[w] == _NONE:  # tree edge: descend into w
                        parent_edge[w] = ei
                        height[w] = height[v] + 1
                        dfs_stack[sp] = v
                        sp += 1
                        dfs_stack[sp] = w
                        sp += 1
                        skip_init[ei] = 1
                        break
                    else:  # back edge
                        lowpt[ei] = height[w]
                # postprocessing of ei, after init or after its subtree is done
                nesting_depth[ei] = 2 * lowpt[ei]
                if lowpt2[ei] < height[v]:  # chordal: bump depth
                    nesting_depth[ei] += 1
                if e != _NONE:
                    if lowpt[ei] < lowpt[e]:
                        lowpt2[e] = min(lowpt[e], lowpt2[ei])
                        lowpt[e] = lowpt[ei]
                    elif lowpt[ei] > lowpt[e]:
                        lowpt2[e] = min(lowpt2[e], lowpt[ei])
                    else:
                        lowpt2[e] = min(lowpt2[e], lowpt2[ei])
                ind[v] += 1

    # ---- phase 2: order each vertex's outgoing edges by nesting depth ----
    # composite key (source, nesting_depth, edge id) makes the order unique
    keys = np.empty(m, np.int64)
    orient_list = np.empty(m, np.int64)
    span = np.int64(2 * n + 4)
    for k in range(m):
        ei = oriented_dir[k]
        orient_list[k] = ei
        keys[k] = (esrc[ei] * span + nesting_depth[ei]) * nd + ei
    perm = np.argsort(keys)

    oadj_start = np.zeros(n + 1, np.int64)
    for k in range(m):
        oadj_start[esrc[orient_list[k]] + 1] += 1
    for v in range(n):
        oadj_start[v + 1] += oadj_start[v]
    oadj_edge = np.empty(m, np.int64)
    for i in range(m):
        oadj_edge[i] = orient_list[perm[i]]

    # ---- phase 3: testing DFS with the conflict-pair stack ----
    # The stack entries are pairs of intervals of back edges; interval chains
    # are threaded through ref[]. Stack identity is tracked by height.
    SL_low = np.empty(m + 4, np.int64)
    SL_high = np.empty(m + 4, np.int64)
    SR_low = np.empty(m + 4, np.int64)
    SR_high = np.empty(m + 4, np.int64)
    ssize = 0
    stack_bottom = np.zeros(nd, np.int64)
    lowpt_edge = np.full(nd, _NONE, np.int64)
    ref = np.full(nd, _NONE, np.int64)
    skip_init2 = np.zeros(nd, np.uint8)
    ind2 = oadj_start[:n].copy()

    for root in range(n):
        if parent_edge[root] != _NONE or height[root] != 0:
            continue
        sp = 0
        dfs_stack[sp] = root
        sp += 1
        while sp > 0:
            sp -= 1
            v = dfs_stack[sp]
            e = parent_edge[v]
            descended = False
            while ind2[v] < oadj_start[v + 1]:
                ei = oadj_edge[ind2[v]]
                w = edst[ei]
                if skip_init2[ei] == 0:
                    stack_bottom[ei] = ssize
                    if ei == parent_edge[w]:  # tree edge: descend into w
                        dfs_stack[sp] = v
                        sp += 1
                        dfs_stack[sp] = w
                        sp += 1
                        skip_init2[ei] = 1
                        descended = True
                        break
                    else:  # back edge starts its own one-sided pair
                        lowpt_edge[ei] = ei
                        SL_low[ssize] = _NONE
                        SL_high[ssize] = _NONE
                        SR_low[ssize] = ei
                        SR_high[ssize] = ei
                        ssize += 1
                if lowpt[ei] < height[v]:  # ei has a return edge below v
                    if ei == oadj_edge[oadj_start[v]]:
                        lowpt_edge[e] = lowpt_edge[ei]
                    else:
                        # integrate ei's constraints into the stack
                        PL_low = _NONE
                        PL_high = _NONE
                        PR_low = _NONE
                        PR_high = _NONE
                        # merge return edges of ei into P.right
                        while True:
                            ssize -= 1
                            QL_low = SL_low[ssize]
                            QL_high = SL_high[ssize]
                            QR_low = SR_low[ssize]
                            QR_high = SR_high[ssize]
                            if QL_low != _NONE or QL_high != _NONE:
                                QL_low, QR_low = QR_low, QL_low
                                QL_high, QR_high = QR_high, QL_high
                            if QL_low != _NONE or QL_high != _NONE:
                                return False  # two-sided constraint
                            if lowpt[QR_low] > lowpt[e]:
                                if PR_low == _NONE and PR_high == _NONE:
                                    PR_high = QR_high
                                else:
                                    ref[PR_low] = QR_high
                                PR_low = QR_low
                            else:
                                ref[QR_low] = lowpt_edge[e]
                            if ssize == stack_bottom[ei]:
                                break
                        # merge conflicting return edges of earlier siblings
                        # into P.left
                        while ssize > 0:
                            tl = ssize - 1
                            cl = (SL_low[tl] != _NONE or SL_high[tl] != _NONE) \
                                and lowpt[SL_high[tl]] > lowpt[ei]
                            cr = (SR_low[tl] != _NONE or SR_high[tl] != _NONE) \
                                and lowpt[SR_high[tl]] > lowpt[ei]
                            if not (cl or cr):
                                break
                            ssize -= 1
                            QL_low = SL_low[ssize]
                            QL_high = SL_high[ssize]
                            QR_low = SR_low[ssize]
                            QR_high = SR_high[ssize]
                            if cr:
                                QL_low, QR_low = QR_low, QL_low
                                QL_high, QR_high = QR_high, QL_high
                            if (QR_low != _NONE or QR_high != _NONE) \
                                    and lowpt[QR_high] > lowpt[ei]:
                                return False  # both sides conflict
                            if PR_low != _NONE:
                                ref[PR_low] = QR_high
                            if QR_low != _NONE:
                                PR_low = QR_low
                            if PL_low == _NONE and PL_high == _NONE:
                                PL_high = QL_high
                            else:
                                ref[PL_low] = QL_high
                            PL_low = QL_low
                        if PL_low != _NONE or PL_high != _NONE \
                                or PR_low != _NONE or PR_high != _NONE:
                            SL_low[ssize] = PL_low
                            SL_high[ssize] = PL_high
                            SR_low[ssize] = PR_low
                            SR_high[ssize] = PR_high
                            ssize += 1
                ind2[v] += 1
            if not descended and e != _NONE:
                # drop back edges that return to v's parent u
                u = esrc[e]
                hu = height[u]
                while ssize > 0:
                    tl = ssize - 1
                    if SL_low[tl] == _NONE and SL_high[tl] == _NONE:
                        low_val = lowpt[SR_low[tl]]
                    elif SR_low[tl] == _NONE and SR_high[tl] == _NONE:
                        low_val = lowpt[SL_low[tl]]
                    else:
                        low_val = min(lowpt[SL_low[tl]], lowpt[SR_low[tl]])
                    if low_val != hu:
                        break
                    ssize -= 1
                if ssize > 0:
                    ssize -= 1
                    PL_low = SL_low[ssize]
                    PL_high = SL_high[ssize]
                    PR_low = SR_low[ssize]
                    PR_high = SR_high[ssize]
                    while PL_high != _NONE and edst[PL_high] == u:
                        PL_high = ref[PL_high]
                    if PL_high == _NONE and PL_low != _NONE:
                        ref[PL_low] = PR_low
                        PL_low = _NONE
                    while PR_high != _NONE and edst[PR_high] == u:
                        PR_high = ref[PR_high]
                    if PR_high == _NONE and PR_low != _NONE:
                        ref[PR_low] = PL_low
                        PR_low = _NONE
                    SL_low[ssize] = PL_low
                    SL_high[ssize] = PL_high
                    SR_low[ssize] = PR_low
                    SR_high[ssize] = PR_high
                    ssize += 1
    return True


def planar_check(n_vertices, edges_u, edges_v):
    """Planarity of a simple undirected graph given as edge endpoint arrays."""
    eu = np.ascontiguousarray(edges_u, dtype=np.int64)
    ev = np.ascontiguousarray(edges_v, dtype=np.int64)
    if eu.shape != ev.shape:
        raise ValueError("edge endpoint arrays must have equal length")
    return bool(planar_check_kernel(int(n_vertices), eu, ev))
