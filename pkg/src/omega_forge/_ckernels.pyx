# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Mirrors ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()


cdef inline int64_t _absdiff(int64_t a, int64_t b, int64_t period) nogil:
    cdef int64_t t = a - b if a >= b else b - a
    if period and period - t < t:
        t = period - t
    return t


def dense_within(const int64_t[:, ::1] dist, const int64_t[::1] rows, int64_t eps):
    cdef Py_ssize_t q = rows.shape[0], n = dist.shape[1], i, j, nnz = 0
    cdef int64_t r
    indptr = np.zeros(q + 1, dtype=np.int64)
    cdef int64_t[::1] ip = indptr
    for i in range(q):
        r = rows[i]
        for j in range(n):
            if dist[r, j] <= eps:
                nnz += 1
        ip[i + 1] = nnz
    indices = np.empty(nnz, dtype=np.int64)
    cdef int64_t[::1] ix = indices
    cdef Py_ssize_t k = 0
    for i in range(q):
        r = rows[i]
        for j in range(n):
            if dist[r, j] <= eps:
                ix[k] = j
                k += 1
    return indptr, indices


cdef inline bint _sup_le(const int64_t[:, ::1] a, Py_ssize_t i,
                         const int64_t[:, ::1] b, Py_ssize_t j,
                         int64_t eps, int64_t period) nogil:
    cdef Py_ssize_t t
    for t in range(a.shape[1]):
        if _absdiff(a[i, t], b[j, t], period) > eps:
            return False
    return True


def sup_within(const int64_t[:, ::1] points, const int64_t[:, ::1] queries,
               int64_t eps, int64_t period):
    cdef Py_ssize_t q = queries.shape[0], n = points.shape[0], i, j, nnz = 0, k = 0
    indptr = np.zeros(q + 1, dtype=np.int64)
    cdef int64_t[::1] ip = indptr
    for i in range(q):
        for j in range(n):
            if _sup_le(queries, i, points, j, eps, period):
                nnz += 1
        ip[i + 1] = nnz
    indices = np.empty(nnz, dtype=np.int64)
    cdef int64_t[::1] ix = indices
    for i in range(q):
        for j in range(n):
            if _sup_le(queries, i, points, j, eps, period):
                ix[k] = j
                k += 1
    return indptr, indices


def scc_labels(const int64_t[::1] indptr, const int64_t[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    index_a = np.full(n, -1, dtype=np.int64)
    low_a = np.zeros(n, dtype=np.int64)
    label_a = np.full(n, -1, dtype=np.int64)
    onst_a = np.zeros(n, dtype=np.uint8)
    stack_a = np.empty(n, dtype=np.int64)
    work_v_a = np.empty(n, dtype=np.int64)
    work_p_a = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] index = index_a, low = low_a, label = label_a
    cdef int64_t[::1] stack = stack_a, work_v = work_v_a, work_p = work_p_a
    cdef uint8_t[::1] on_stack = onst_a
    cdef Py_ssize_t sp = 0, wp = 0
    cdef int64_t counter = 0, n_comp = 0, root, v, w, u, pos
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = 1
        work_v[wp] = root
        work_p[wp] = indptr[root]
        wp += 1
        while wp > 0:
            v = work_v[wp - 1]
            pos = work_p[wp - 1]
            if pos < indptr[v + 1]:
                work_p[wp - 1] = pos + 1
                w = indices[pos]
                if index[w] == -1:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    on_stack[w] = 1
                    work_v[wp] = w
                    work_p[wp] = indptr[w]
                    wp += 1
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            wp -= 1
            if wp > 0:
                u = work_v[wp - 1]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                while True:
                    sp -= 1
                    w = stack[sp]
                    on_stack[w] = 0
                    label[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
    return label_a


def bfs_toward(const int64_t[::1] rev_indptr, const int64_t[::1] rev_indices, int64_t target):
    cdef Py_ssize_t n = rev_indptr.shape[0] - 1, head = 0, tail = 0, k
    dist_a = np.full(n, -1, dtype=np.int64)
    queue_a = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] dist = dist_a, queue = queue_a
    cdef int64_t u, v, du
    dist[target] = 0
    queue[tail] = target
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for k in range(rev_indptr[u], rev_indptr[u + 1]):
            v = rev_indices[k]
            if dist[v] == -1:
                dist[v] = du
                queue[tail] = v
                tail += 1
    return dist_a


def directed_hausdorff_sup(const int64_t[:, ::1] a, const int64_t[:, ::1] b, int64_t period):
    cdef Py_ssize_t i, j, t
    cdef int64_t worst = 0, best, d, s
    for i in range(a.shape[0]):
        best = -1
        for j in range(b.shape[0]):
            d = 0
            for t in range(a.shape[1]):
                s = _absdiff(a[i, t], b[j, t], period)
                if s > d:
                    d = s
            if best == -1 or d < best:
                best = d
                if best <= worst:
                    break
        if best > worst:
            worst = best
    return worst


def directed_hausdorff_dense(const int64_t[:, ::1] dist, const int64_t[::1] a_ids,
                             const int64_t[::1] b_ids):
    cdef Py_ssize_t i, j
    cdef int64_t worst = 0, best, d
    for i in range(a_ids.shape[0]):
        best = -1
        for j in range(b_ids.shape[0]):
            d = dist[a_ids[i], b_ids[j]]
            if best == -1 or d < best:
                best = d
        if best > worst:
            worst = best
    return worst


def pair_certificate(const int64_t[::1] orbit, const uint8_t[:, ::1] good, Py_ssize_t start):
    cdef Py_ssize_t n, bad = 0, first = -1
    for n in range(start, orbit.shape[0] - 1):
        if not good[orbit[n], orbit[n + 1]]:
            bad += 1
            if first == -1:
                first = n
    return bad, first
