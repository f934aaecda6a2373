# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels; see ``_pykernels`` for the reference versions."""

from libc.stdlib cimport malloc, free, qsort
from libc.math cimport fabs, INFINITY


cdef double* _load(object seq, Py_ssize_t* size) except NULL:
    cdef Py_ssize_t n = len(seq)
    cdef double* buf = <double*>malloc((n if n > 0 else 1) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = seq[i]
    size[0] = n
    return buf


cdef inline double _nearest(double p, double* locs, Py_ssize_t k) noexcept nogil:
    cdef double best = fabs(locs[0] - p)
    cdef double d
    cdef Py_ssize_t j
    for j in range(k):
        d = fabs(locs[j] - p)
        if d < best:
            best = d
    return best


def nearest(double p, object locs):
    cdef Py_ssize_t k
    cdef double* l = _load(locs, &k)
    try:
        return _nearest(p, l, k)
    finally:
        free(l)


def max_nearest(object points, object locs):
    cdef Py_ssize_t n, k, i
    cdef double worst = 0.0, d
    cdef double* x = _load(points, &n)
    cdef double* l = NULL
    try:
        l = _load(locs, &k)
        for i in range(n):
            d = _nearest(x[i], l, k)
            if d > worst:
                worst = d
        return worst
    finally:
        free(x)
        free(l)


def sum_nearest(object points, object locs):
    cdef Py_ssize_t n, k, i
    cdef double total = 0.0
    cdef double* x = _load(points, &n)
    cdef double* l = NULL
    try:
        l = _load(locs, &k)
        for i in range(n):
            total += _nearest(x[i], l, k)
        return total
    finally:
        free(x)
        free(l)


def expected_nearest(double p, object atom_locs, object probs):
    cdef double total = 0.0
    cdef Py_ssize_t k
    cdef double* l
    for locs, w in zip(atom_locs, probs):
        l = _load(locs, &k)
        total += <double>w * _nearest(p, l, k)
        free(l)
    return total


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double da = (<double*>a)[0]
    cdef double db = (<double*>b)[0]
    return (da > db) - (da < db)


cdef Py_ssize_t _greedy(double* x, Py_ssize_t n, double diameter,
                        Py_ssize_t* firsts, Py_ssize_t* lasts) noexcept nogil:
    cdef Py_ssize_t i = 0, j, count = 0
    cdef double start
    while i < n:
        start = x[i]
        j = i
        while j + 1 < n and x[j + 1] - start <= diameter:
            j += 1
        if firsts != NULL:
            firsts[count] = i
            lasts[count] = j
        count += 1
        i = j + 1
    return count


cdef tuple _pad(list locs, Py_ssize_t k):
    cdef object last = locs[len(locs) - 1]
    while len(locs) < k:
        locs.append(last)
    return tuple(locs)


cdef list _distinct(double* x, Py_ssize_t n):
    cdef list out = [x[0]]
    cdef Py_ssize_t i
    for i in range(1, n):
        if x[i] != x[i - 1]:
            out.append(x[i])
    return out


def kcenter(object points, Py_ssize_t k):
    cdef Py_ssize_t n, i, j, m = 0, u, lo, hi, mid, count
    cdef double* x = _load(points, &n)
    cdef double* diam = NULL
    cdef Py_ssize_t* firsts = NULL
    cdef Py_ssize_t* lasts = NULL
    try:
        if k >= n:
            return 0.0, _pad(_distinct(x, n), k)
        diam = <double*>malloc(n * (n + 1) // 2 * sizeof(double))
        firsts = <Py_ssize_t*>malloc(n * sizeof(Py_ssize_t))
        lasts = <Py_ssize_t*>malloc(n * sizeof(Py_ssize_t))
        if diam == NULL or firsts == NULL or lasts == NULL:
            raise MemoryError()
        for i in range(n):
            for j in range(i, n):
                diam[m] = x[j] - x[i]
                m += 1
        qsort(diam, m, sizeof(double), _cmp_double)
        u = 0
        for i in range(1, m):
            if diam[i] != diam[u]:
                u += 1
                diam[u] = diam[i]
        lo = 0
        hi = u
        while lo < hi:
            mid = (lo + hi) // 2
            if _greedy(x, n, diam[mid], NULL, NULL) <= k:
                hi = mid
            else:
                lo = mid + 1
        count = _greedy(x, n, diam[lo], firsts, lasts)
        locs = [(x[firsts[i]] + x[lasts[i]]) / 2.0 for i in range(count)]
        return diam[lo] / 2.0, _pad(locs, k)
    finally:
        free(x)
        free(diam)
        free(firsts)
        free(lasts)


cdef inline double _cluster_cost(double* x, double* prefix,
                                 Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t m = (i + j) // 2
    cdef double med = x[m]
    cdef double left = med * (m - i + 1) - (prefix[m + 1] - prefix[i])
    cdef double right = (prefix[j + 1] - prefix[m + 1]) - med * (j - m)
    return left + right


def kmedian(object points, Py_ssize_t k):
    cdef Py_ssize_t n, c, t, s, w
    cdef double v
    cdef double* x = _load(points, &n)
    cdef double* prefix = NULL
    cdef double* best = NULL
    cdef Py_ssize_t* split = NULL
    try:
        if k >= n:
            return 0.0, _pad(_distinct(x, n), k)
        w = n + 1
        prefix = <double*>malloc(w * sizeof(double))
        best = <double*>malloc((k + 1) * w * sizeof(double))
        split = <Py_ssize_t*>malloc((k + 1) * w * sizeof(Py_ssize_t))
        if prefix == NULL or best == NULL or split == NULL:
            raise MemoryError()
        prefix[0] = 0.0
        for t in range(n):
            prefix[t + 1] = prefix[t] + x[t]
        for t in range((k + 1) * w):
            best[t] = INFINITY
            split[t] = 0
        best[0] = 0.0
        for c in range(1, k + 1):
            for t in range(c, n + 1):
                for s in range(c - 1, t):
                    if best[(c - 1) * w + s] == INFINITY:
                        continue
                    v = best[(c - 1) * w + s] + _cluster_cost(x, prefix, s, t - 1)
                    if v < best[c * w + t]:
                        best[c * w + t] = v
                        split[c * w + t] = s
        locs = []
        t = n
        for c in range(k, 0, -1):
            s = split[c * w + t]
            locs.append(x[(s + t - 1) // 2])
            t = s
        locs.reverse()
        return best[k * w + n], tuple(locs)
    finally:
        free(x)
        free(prefix)
        free(best)
        free(split)
