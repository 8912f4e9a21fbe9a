# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled functional-graph kernels; see ``_purepy`` for the reference semantics."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

ctypedef cnp.int64_t i64


cdef cnp.ndarray _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def three_color(succ_in):
    cdef i64[::1] succ = _i64(succ_in)
    cdef Py_ssize_t n = succ.shape[0]
    out = np.full(n, -1, dtype=np.int8)
    cdef cnp.int8_t[::1] color = out
    cdef cnp.int8_t[::1] state = np.zeros(n, dtype=np.int8)
    cdef i64[::1] path = np.empty(n + 1, dtype=np.int64)
    cdef Py_ssize_t s, plen, idx, j, L, m, k
    cdef i64 x, v
    cdef int c
    for s in range(n):
        if state[s]:
            continue
        plen = 0
        x = s
        while x >= 0 and state[x] == 0:
            state[x] = 1
            path[plen] = x
            plen += 1
            x = succ[x]
        if x >= 0 and state[x] == 1:
            idx = plen - 1
            while path[idx] != x:
                idx -= 1
            L = plen - idx
            if L == 1:
                raise ValueError(f"vertex {x} is a fixed point")
            m = idx
            for j in range(idx, plen):
                if path[j] < path[m]:
                    m = j
            for j in range(L):
                k = idx + (m - idx + j) % L
                color[path[k]] = j & 1
                state[path[k]] = 2
            if L & 1:
                k = idx + (m - idx + L - 1) % L
                color[path[k]] = 2
            plen = idx
        elif x < 0:
            plen -= 1
            color[path[plen]] = 0
            state[path[plen]] = 2
        for j in range(plen - 1, -1, -1):
            v = path[j]
            c = color[succ[v]]
            color[v] = 1 - c if c < 2 else 1
            state[v] = 2
    return out


def recurrent_mask(succ_in, colors_in):
    cdef i64[::1] succ = _i64(succ_in)
    cdef i64[::1] colors = _i64(colors_in)
    cdef Py_ssize_t n = succ.shape[0], x
    out = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] a = out
    cdef i64 y, z, c0, c1
    for x in range(n):
        y = succ[x]
        if y < 0:
            continue
        c0 = colors[x]
        c1 = colors[y]
        if c1 == 2 and c0 < 2:
            a[x] = 1
        elif c0 == 0 and c1 == 1:
            z = succ[y]
            if z >= 0 and colors[z] == 0:
                a[x] = 1
    return out


def check_recurrent(succ_in, mask_in):
    cdef i64[::1] succ = _i64(succ_in)
    cdef i64[::1] mask = _i64(mask_in)
    cdef Py_ssize_t n = succ.shape[0], x
    cdef i64 y, z
    cdef int step, hit
    cdef bint independent = True, recurrent = True
    for x in range(n):
        y = succ[x]
        if mask[x] and y >= 0 and mask[y]:
            independent = False
        z = x
        hit = 0
        for step in range(4):
            if z < 0 or mask[z]:
                hit = 1
                break
            z = succ[z]
        if not hit:
            recurrent = False
    return independent, recurrent


cdef inline i64 _find(i64[::1] parent, i64 a) noexcept nogil:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


cdef inline void _union(i64[::1] parent, i64 u, i64 v) noexcept nogil:
    cdef i64 a = _find(parent, u), b = _find(parent, v)
    if a < b:
        parent[b] = a
    elif b < a:
        parent[a] = b


cdef Py_ssize_t _dense(i64[::1] parent, i64[::1] out) noexcept nogil:
    cdef Py_ssize_t n = parent.shape[0], x, k = 0
    cdef i64 r
    # roots are minimal members, so the first visit of a root is its class's smallest vertex
    for x in range(n):
        r = _find(parent, x)
        if r == x:
            out[x] = k
            k += 1
        else:
            out[x] = out[r]
    return k


def contraction_classes(succ_in, mask_in):
    cdef i64[::1] succ = _i64(succ_in)
    cdef i64[::1] mask = _i64(mask_in)
    cdef Py_ssize_t n = succ.shape[0], x, plen
    cdef cnp.uint8_t[::1] is_exit = np.zeros(n, dtype=np.uint8)
    cdef i64[::1] indeg = np.zeros(n, dtype=np.int64)
    cdef i64[::1] depth = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] path = np.empty(n + 1, dtype=np.int64)
    joined_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] joined = joined_arr
    cdef cnp.uint8_t[::1] cut = np.zeros(n, dtype=np.uint8)
    cdef i64 y, v, d
    for x in range(n):
        is_exit[x] = 1 if (mask[x] or succ[x] < 0) else 0
        if succ[x] >= 0:
            indeg[succ[x]] += 1
    for x in range(n):
        if depth[x] >= 0:
            continue
        plen = 0
        y = x
        while depth[y] < 0 and not is_exit[y]:
            depth[y] = -2
            path[plen] = y
            plen += 1
            y = succ[y]
            if depth[y] == -2:
                raise ValueError("a cycle contains no selected vertex")
        if is_exit[y]:
            depth[y] = 0
        d = depth[y]
        while plen > 0:
            plen -= 1
            d += 1
            depth[path[plen]] = d
    for x in range(n):
        joined[x] = 0 if is_exit[x] else 1
    for x in range(n):
        if mask[x] and indeg[x] == 0 and succ[x] >= 0:
            joined[x] = 1
            v = succ[x]
            if depth[v] >= 3:
                cut[v] = 1
    for x in range(n):
        if cut[x]:
            joined[x] = 0
    cdef i64[::1] parent = np.arange(n, dtype=np.int64)
    for x in range(n):
        if joined[x]:
            _union(parent, x, succ[x])
    cls_arr = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t k = _dense(parent, cls_arr)
    return cls_arr, k, joined_arr


def quotient_succ(succ_in, cls_in, Py_ssize_t k):
    cdef i64[::1] succ = _i64(succ_in)
    cdef i64[::1] cls = _i64(cls_in)
    cdef Py_ssize_t n = succ.shape[0], x
    out_arr = np.full(k, -1, dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef i64 y, a, b
    for x in range(n):
        y = succ[x]
        if y < 0:
            continue
        a = cls[x]
        b = cls[y]
        if a == b:
            continue
        if out[a] == -1:
            out[a] = b
        elif out[a] != b:
            raise ValueError(f"class {a} has edges to classes {out[a]} and {b}")
    return out_arr


def component_labels(Py_ssize_t n, us_in, vs_in):
    cdef i64[::1] us = _i64(us_in)
    cdef i64[::1] vs = _i64(vs_in)
    cdef i64[::1] parent = np.arange(n, dtype=np.int64)
    cdef Py_ssize_t i, m = us.shape[0]
    for i in range(m):
        _union(parent, us[i], vs[i])
    labels = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t k = _dense(parent, labels)
    return labels, k


cdef enum:
    MAXN = 12


cdef bint _check_one(int n, int* f, int* c) noexcept nogil:
    cdef int a[MAXN]
    cdef int x, y, z, step, hit
    for x in range(n):
        a[x] = 0
        y = f[x]
        if c[y] == 2 and c[x] < 2:
            a[x] = 1
        elif c[x] == 0 and c[y] == 1 and c[f[y]] == 0:
            a[x] = 1
    for x in range(n):
        if a[x] and a[f[x]]:
            return False
        z = x
        hit = 0
        for step in range(4):
            if a[z]:
                hit = 1
                break
            z = f[z]
        if not hit:
            return False
    return True


def exhaustive_recurrence(int n):
    if n > MAXN:
        raise ValueError(f"n must be at most {MAXN}")
    cdef int f[MAXN]
    cdef int c[MAXN]
    cdef int lower[MAXN][MAXN]
    cdef int nlower[MAXN]
    cdef long long maps = 0, colorings = 0, failures = 0
    cdef int x, v, u, j, ok
    if n < 2:
        return 0, 0, 0
    for x in range(n):
        f[x] = 1 if x == 0 else 0
    with nogil:
        while True:
            maps += 1
            for x in range(n):
                nlower[x] = 0
            for x in range(n):
                if f[x] < x:
                    lower[x][nlower[x]] = f[x]
                    nlower[x] += 1
                else:
                    lower[f[x]][nlower[f[x]]] = x
                    nlower[f[x]] += 1
            # depth-first enumeration of proper colorings, c[v] = -1 means untried
            v = 0
            c[0] = -1
            while v >= 0:
                c[v] += 1
                if c[v] > 2:
                    v -= 1
                    continue
                ok = 1
                for j in range(nlower[v]):
                    u = lower[v][j]
                    if c[u] == c[v]:
                        ok = 0
                        break
                if not ok:
                    continue
                if v == n - 1:
                    colorings += 1
                    if not _check_one(n, f, c):
                        failures += 1
                else:
                    v += 1
                    c[v] = -1
            # next fixed-point-free map in odometer order
            x = n - 1
            while x >= 0:
                f[x] += 1
                if f[x] == x:
                    f[x] += 1
                if f[x] < n:
                    break
                f[x] = 1 if x == 0 else 0
                x -= 1
            if x < 0:
                break
    return maps, colorings, failures
