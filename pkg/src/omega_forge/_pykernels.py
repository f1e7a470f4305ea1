"""Pure-Python kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is not built or ``OMEGA_FORGE_PURE_PYTHON=1`` is set.
"""
from collections import deque

import numpy as np


def _csr(rows):
    indptr = [0]
    indices = []
    for row in rows:
        indices.extend(row)
        indptr.append(len(indices))
    return np.asarray(indptr, dtype=np.int64), np.asarray(indices, dtype=np.int64)


def dense_within(dist, rows, eps):
    """Row ``r`` of the result lists the columns ``j`` with ``dist[r, j] <= eps``."""
    table = dist.tolist()
    out = []
    for r in rows.tolist():
        out.append([j for j, v in enumerate(table[r]) if v <= eps])
    return _csr(out)


def sup_within(points, queries, eps, period):
    pts = [tuple(p) for p in points.tolist()]
    out = []
    for q in queries.tolist():
        hits = []
        for j, p in enumerate(pts):
            ok = True
            for a, b in zip(q, p):
                t = a - b if a >= b else b - a
                if period and period - t < t:
                    t = period - t
                if t > eps:
                    ok = False
                    break
            if ok:
                hits.append(j)
        out.append(hits)
    return _csr(out)


def scc_labels(indptr, indices):
    """Tarjan's algorithm, iterative.  Labels are assigned in completion order."""
    ptr = indptr.tolist()
    idx = indices.tolist()
    n = len(ptr) - 1
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    label = [-1] * n
    stack = []
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, ptr[root])]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < ptr[v + 1]:
                work[-1] = (v, pos + 1)
                w = idx[pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, ptr[w]))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    label[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
    return np.asarray(label, dtype=np.int64)


def bfs_toward(rev_indptr, rev_indices, target):
    """Hop distance from every vertex to ``target`` (-1 when unreachable)."""
    ptr = rev_indptr.tolist()
    idx = rev_indices.tolist()
    n = len(ptr) - 1
    dist = [-1] * n
    dist[target] = 0
    queue = deque([target])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for k in range(ptr[u], ptr[u + 1]):
            v = idx[k]
            if dist[v] == -1:
                dist[v] = du
                queue.append(v)
    return np.asarray(dist, dtype=np.int64)


def directed_hausdorff_sup(a, b, period):
    bs = b.tolist()
    worst = 0
    for p in a.tolist():
        best = None
        for q in bs:
            d = 0
            for x, y in zip(p, q):
                t = x - y if x >= y else y - x
                if period and period - t < t:
                    t = period - t
                if t > d:
                    d = t
            if best is None or d < best:
                best = d
                if best <= worst:
                    break
        if best > worst:
            worst = best
    return worst


def directed_hausdorff_dense(dist, a_ids, b_ids):
    table = dist.tolist()
    bs = b_ids.tolist()
    worst = 0
    for i in a_ids.tolist():
        row = table[i]
        best = min(row[j] for j in bs)
        if best > worst:
            worst = best
    return worst


def pair_certificate(orbit, good, start):
    """Count consecutive pairs ``(orbit[n], orbit[n+1])``, ``n >= start``, not marked good.

    Returns ``(bad_count, first_bad_index)``; the index is -1 when all pairs pass.
    """
    seq = orbit.tolist()
    table = good.tolist()
    bad = 0
    first = -1
    for n in range(start, len(seq) - 1):
        if not table[seq[n]][seq[n + 1]]:
            bad += 1
            if first == -1:
                first = n
    return bad, first
