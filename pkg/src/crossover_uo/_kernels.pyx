# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels: Bareiss rank, pivoted LDL^T sign test, counting.

Entries are held as int64; every Bareiss update goes through a 128-bit
intermediate and raises OverflowError if the exact quotient leaves int64.
Callers fall back to the pure-Python kernels in that case.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memset

BACKEND = "cython"

cdef extern from *:
    """
    #include <stdint.h>
    static int xo_bareiss(int64_t akk, int64_t aij, int64_t aik, int64_t akj,
                          int64_t prev, int64_t *out) {
        __int128 num = (__int128)akk * aij - (__int128)aik * akj;
        __int128 q = num / prev;
        if (q > (__int128)INT64_MAX || q < (__int128)INT64_MIN) return 1;
        *out = (int64_t)q;
        return 0;
    }
    """
    ctypedef long long int64_t
    int xo_bareiss(int64_t akk, int64_t aij, int64_t aik, int64_t akj,
                   int64_t prev, int64_t *out) nogil


cdef int64_t* _load(rows, Py_ssize_t m, Py_ssize_t n) except NULL:
    cdef int64_t* a = <int64_t*>malloc(max(m * n, 1) * sizeof(int64_t))
    if a == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    try:
        for i in range(m):
            r = rows[i]
            if len(r) != n:
                raise ValueError("ragged matrix")
            for j in range(n):
                a[i * n + j] = r[j]
    except BaseException:
        free(a)
        raise
    return a


def bareiss_rank(rows):
    """Rank of an integer matrix given as a list of row lists."""
    cdef Py_ssize_t m = len(rows)
    if m == 0:
        return 0
    cdef Py_ssize_t n = len(rows[0])
    cdef int64_t* a = _load(rows, m, n)
    cdef Py_ssize_t rank = 0, c, i, j, piv
    cdef int64_t prev = 1, akk, aic, tmp
    cdef int bad = 0
    try:
        with nogil:
            for c in range(n):
                if rank == m:
                    break
                piv = -1
                for i in range(rank, m):
                    if a[i * n + c] != 0:
                        piv = i
                        break
                if piv < 0:
                    continue
                if piv != rank:
                    for j in range(n):
                        tmp = a[piv * n + j]
                        a[piv * n + j] = a[rank * n + j]
                        a[rank * n + j] = tmp
                akk = a[rank * n + c]
                for i in range(rank + 1, m):
                    aic = a[i * n + c]
                    for j in range(c + 1, n):
                        if xo_bareiss(akk, a[i * n + j], aic, a[rank * n + j],
                                      prev, &a[i * n + j]):
                            bad = 1
                            break
                    if bad:
                        break
                    a[i * n + c] = 0
                if bad:
                    break
                prev = akk
                rank += 1
    finally:
        free(a)
    if bad:
        raise OverflowError("bareiss_rank: int64 overflow")
    return rank


def symmetric_ldl(rows):
    """Fraction-free symmetrically pivoted LDL^T sign test.

    Returns ``(nnd, pivots)`` with ``pivots`` the positive D entries as
    ``(num, den)`` pairs.
    """
    cdef Py_ssize_t k = len(rows)
    if k == 0:
        return True, []
    cdef int64_t* a = _load(rows, k, k)
    cdef char* alive = <char*>malloc(k)
    if alive == NULL:
        free(a)
        raise MemoryError()
    memset(alive, 1, k)
    cdef Py_ssize_t left = k, i, j, best
    cdef int64_t prev = 1, app, aip, d
    cdef int bad = 0
    pivots = []
    result = True
    try:
        while left > 0:
            best = -1
            for i in range(k):
                if not alive[i]:
                    continue
                d = a[i * k + i]
                if d < 0:
                    result = False
                    break
                if d > 0 and best < 0:
                    best = i
            if not result:
                break
            if best < 0:
                for i in range(k):
                    if not alive[i]:
                        continue
                    for j in range(k):
                        if alive[j] and a[i * k + j] != 0:
                            result = False
                            break
                    if not result:
                        break
                break
            app = a[best * k + best]
            alive[best] = 0
            left -= 1
            with nogil:
                for i in range(k):
                    if not alive[i]:
                        continue
                    aip = a[i * k + best]
                    for j in range(k):
                        if not alive[j]:
                            continue
                        if xo_bareiss(app, a[i * k + j], aip, a[best * k + j],
                                      prev, &a[i * k + j]):
                            bad = 1
                            break
                    if bad:
                        break
            if bad:
                break
            pivots.append((app, prev))
            prev = app
    finally:
        free(a)
        free(alive)
    if bad:
        raise OverflowError("symmetric_ldl: int64 overflow")
    return result, pivots


def frequency_counts(grid, int v):
    """Raw counts of a p x n design with labels 1..v; see the Python kernel."""
    cdef Py_ssize_t p = len(grid)
    cdef Py_ssize_t n = len(grid[0])
    cdef int* d = <int*>malloc(p * n * sizeof(int))
    if d == NULL:
        raise MemoryError()
    cdef Py_ssize_t k, u, i
    try:
        for k in range(p):
            row = grid[k]
            for u in range(n):
                d[k * n + u] = row[u] - 1
        N = [[0] * n for _ in range(v)]
        Nt = [[0] * n for _ in range(v)]
        S = [[0] * v for _ in range(v)]
        L = [[0] * p for _ in range(v)]
        for k in range(p):
            for u in range(n):
                i = d[k * n + u]
                N[i][u] += 1
                L[i][k] += 1
                if k < p - 1:
                    Nt[i][u] += 1
                if k > 0:
                    S[i][d[(k - 1) * n + u]] += 1
        last = [d[(p - 1) * n + u] for u in range(n)]
    finally:
        free(d)
    return N, Nt, S, L, last
