"""Pure-Python versions of the integer kernels.

Same signatures and results as the compiled ``_kernels`` module; used when
the extension is unavailable or when ``CROSSOVER_UO_PURE=1`` is set.
"""

BACKEND = "python"


def bareiss_rank(rows):
    """Rank of an integer matrix given as a list of row lists."""
    a = [list(r) for r in rows]
    m = len(a)
    if m == 0:
        return 0
    n = len(a[0])
    rank = 0
    prev = 1
    for c in range(n):
        if rank == m:
            break
        piv = -1
        for i in range(rank, m):
            if a[i][c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            a[piv], a[rank] = a[rank], a[piv]
        pr = a[rank]
        akk = pr[c]
        for i in range(rank + 1, m):
            ri = a[i]
            aic = ri[c]
            for j in range(c + 1, n):
                ri[j] = (akk * ri[j] - aic * pr[j]) // prev
            ri[c] = 0
        prev = akk
        rank += 1
    return rank


def symmetric_ldl(rows):
    """Fraction-free symmetrically pivoted LDL^T sign test.

    Returns ``(nnd, pivots)`` where ``pivots`` lists the positive D entries as
    ``(num, den)`` pairs in elimination order. ``nnd`` is False as soon as a
    negative diagonal shows up, or when the remaining diagonal is all zero but
    the remaining block is not.
    """
    a = [list(r) for r in rows]
    active = list(range(len(a)))
    prev = 1
    pivots = []
    while active:
        best = -1
        for i in active:
            d = a[i][i]
            if d < 0:
                return False, pivots
            if d > 0 and best < 0:
                best = i
        if best < 0:
            for i in active:
                ri = a[i]
                for j in active:
                    if ri[j] != 0:
                        return False, pivots
            return True, pivots
        app = a[best][best]
        rp = a[best]
        active.remove(best)
        for i in active:
            ri = a[i]
            aip = ri[best]
            for j in active:
                ri[j] = (app * ri[j] - aip * rp[j]) // prev
        pivots.append((app, prev))
        prev = app
    return True, pivots


def frequency_counts(grid, v):
    """Raw counts of a p x n design with labels 1..v.

    Returns ``(N, Ntilde, S, L, last)``: N and Ntilde as v x n nested lists,
    S as v x v, L as v x p, ``last`` the 0-based last-period label per subject.
    """
    p = len(grid)
    n = len(grid[0])
    N = [[0] * n for _ in range(v)]
    Nt = [[0] * n for _ in range(v)]
    S = [[0] * v for _ in range(v)]
    L = [[0] * p for _ in range(v)]
    for k in range(p):
        row = grid[k]
        Lk = k
        for u in range(n):
            i = row[u] - 1
            N[i][u] += 1
            L[i][Lk] += 1
            if k < p - 1:
                Nt[i][u] += 1
            if k > 0:
                S[i][grid[k - 1][u] - 1] += 1
    last = [x - 1 for x in grid[p - 1]]
    return N, Nt, S, L, last
