# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the labeling and split-search kernels."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t root = i, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


cdef inline void _union(Py_ssize_t[::1] parent, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    a = _find(parent, a)
    b = _find(parent, b)
    if a < b:
        parent[b] = a
    elif b < a:
        parent[a] = b


def label_mask(mask, int connectivity=4):
    if connectivity != 4 and connectivity != 8:
        raise ValueError("connectivity must be 4 or 8")
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=bool).view(np.uint8)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    if h == 0 or w == 0:
        return labels_arr, 0
    cdef cnp.int32_t[:, ::1] labels = labels_arr
    cdef Py_ssize_t[::1] prov = np.zeros(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] parent = np.arange(h * w, dtype=np.intp)
    cdef Py_ssize_t y, x, idx
    cdef cnp.int32_t count = 0
    cdef Py_ssize_t[::1] final = np.zeros(h * w, dtype=np.intp)
    cdef bint eight = connectivity == 8
    with nogil:
        # provisional id = linear index of the pixel; parents point to smaller ids
        for y in range(h):
            for x in range(w):
                if not m[y, x]:
                    continue
                idx = y * w + x
                if x > 0 and m[y, x - 1]:
                    _union(parent, idx, idx - 1)
                if y > 0:
                    if m[y - 1, x]:
                        _union(parent, idx, idx - w)
                    if eight:
                        if x > 0 and m[y - 1, x - 1]:
                            _union(parent, idx, idx - w - 1)
                        if x + 1 < w and m[y - 1, x + 1]:
                            _union(parent, idx, idx - w + 1)
        for y in range(h):
            for x in range(w):
                if not m[y, x]:
                    continue
                idx = _find(parent, y * w + x)
                if final[idx] == 0:
                    count += 1
                    final[idx] = count
                labels[y, x] = <cnp.int32_t>final[idx]
    return labels_arr, int(count)


def best_split(x, y, Py_ssize_t min_leaf):
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.int64)
    cdef Py_ssize_t n = xa.shape[0]
    if n < 2 * min_leaf or n < 2:
        return np.inf, np.nan
    order = np.argsort(xa, kind="stable")
    cdef double[::1] xs = np.ascontiguousarray(xa[order])
    cdef cnp.int64_t[::1] ys = np.ascontiguousarray(ya[order])
    cdef cnp.int64_t total = 0, pl = 0, pr, nl, nr, num, den
    cdef Py_ssize_t i, best = -1
    cdef double score, best_score = np.inf
    for i in range(n):
        total += ys[i]
    for i in range(n - 1):
        pl += ys[i]
        nl = i + 1
        nr = n - nl
        if xs[i] >= xs[i + 1] or nl < min_leaf or nr < min_leaf:
            continue
        pr = total - pl
        num = pl * (nl - pl) * nr + pr * (nr - pr) * nl
        den = nl * nr * n
        score = (<double>num) / (<double>den)
        if score < best_score:
            best_score = score
            best = i
    if best < 0:
        return np.inf, np.nan
    return float(best_score), float((xs[best] + xs[best + 1]) / 2.0)
