# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled max-slack simplex kernel. Same algorithm as ``fallback.py``."""

import numpy as np
cimport numpy as cnp


cnp.import_array()

from libc.math cimport fabs

DEF PIVOT_TOL = 1e-10
DEF COST_TOL = 1e-10
DEF DEGENERATE_STREAK = 25
DEF MAX_REFACTOR = 5
DEF SINGULAR_TOL = 1e-14
DEF REFACTOR_EVERY = 64
DEF REL_PIVOT_TOL = 1e-8
DEF MAX_REJECT = 8

cdef int OPTIMAL = 0
cdef int INFEASIBLE = 1
cdef int NUMERICAL = 2


cdef void _pivot(double[:, ::1] T, long[::1] basis, Py_ssize_t r, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t nrows = T.shape[0]
    cdef Py_ssize_t ncols = T.shape[1]
    cdef Py_ssize_t i, k
    cdef double p = T[r, j]
    cdef double f
    for k in range(ncols):
        T[r, k] /= p
    T[r, j] = 1.0
    for i in range(nrows):
        if i == r:
            continue
        f = T[i, j]
        if f == 0.0:
            continue
        for k in range(ncols):
            T[i, k] -= f * T[r, k]
        T[i, j] = 0.0
    basis[r] = j


cdef bint _refactor(double[:, ::1] T, double[:, ::1] A0, long[::1] basis,
                    double[::1] cost) noexcept nogil:
    """Rebuild rows from the original data by Gauss-Jordan on the basis
    columns (partial pivoting), then the objective row. False if singular."""
    cdef Py_ssize_t rows = A0.shape[0]
    cdef Py_ssize_t width = T.shape[1]
    cdef Py_ssize_t ncost = cost.shape[0]
    cdef Py_ssize_t idx, i, k, p, j
    cdef double mag, best, tmp, c
    for i in range(rows):
        for k in range(width):
            T[i, k] = A0[i, k]
    for idx in range(rows):
        j = basis[idx]
        p = idx
        best = -1.0
        for i in range(idx, rows):
            mag = T[i, j] if T[i, j] >= 0.0 else -T[i, j]
            if mag > best:
                best = mag
                p = i
        if best < SINGULAR_TOL:
            return False
        if p != idx:
            for k in range(width):
                tmp = T[idx, k]
                T[idx, k] = T[p, k]
                T[p, k] = tmp
        _pivot(T, basis, idx, j)
    for k in range(width):
        T[rows, k] = 0.0
    for i in range(rows):
        c = cost[basis[i]]
        for k in range(width):
            T[rows, k] += c * T[i, k]
    for k in range(ncost):
        T[rows, k] -= cost[k]
    return True


cdef bint _blocking(double[:, ::1] T, Py_ssize_t j, Py_ssize_t nrows, Py_ssize_t rhs,
                    double* best_ratio, double* top_pivot, double* col_max) noexcept nogil:
    """Minimum ratio of column j and the largest pivot attaining it.
    False if the column has no positive entry."""
    cdef Py_ssize_t i
    cdef double a, ratio
    cdef bint found = False
    col_max[0] = 0.0
    for i in range(nrows):
        a = T[i, j]
        if fabs(a) > col_max[0]:
            col_max[0] = fabs(a)
        if a > PIVOT_TOL:
            ratio = T[i, rhs] / a
            if not found or ratio < best_ratio[0]:
                found = True
                best_ratio[0] = ratio
                top_pivot[0] = a
            elif ratio == best_ratio[0] and a > top_pivot[0]:
                top_pivot[0] = a
    return found


cdef int _iterate(double[:, ::1] T, long[::1] basis, Py_ssize_t n_allowed,
                  long max_iter, double[:, ::1] A0, double[::1] cost) noexcept nogil:
    """0 optimal, -1 unbounded, -2 iteration cap or singular basis."""
    cdef Py_ssize_t nrows = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t i, j, k, r, q, c, first
    cdef double best_cost, best_ratio, top_pivot, col_max, a, ratio, floor_
    cdef long it
    cdef int streak = 0
    cdef bint bland, skip
    cdef Py_ssize_t tried[MAX_REJECT]
    for it in range(max_iter):
        bland = streak > DEGENERATE_STREAK
        # entering candidates, best first: lowest index under Bland, most
        # negative reduced cost (then lowest index) otherwise; a column whose
        # blocking pivot is tiny next to the rest of the column is passed over
        j = -1
        first = -1
        for q in range(MAX_REJECT):
            c = -1
            if bland:
                k = tried[q - 1] + 1 if q > 0 else 0
                while k < n_allowed:
                    if T[nrows, k] < -COST_TOL:
                        c = k
                        break
                    k += 1
            else:
                best_cost = -COST_TOL
                for k in range(n_allowed):
                    if T[nrows, k] < best_cost:
                        skip = False
                        for i in range(q):
                            if tried[i] == k:
                                skip = True
                                break
                        if not skip:
                            best_cost = T[nrows, k]
                            c = k
            if c < 0:
                break
            tried[q] = c
            if first < 0:
                first = c
            if not _blocking(T, c, nrows, rhs, &best_ratio, &top_pivot, &col_max):
                return -1
            if top_pivot >= REL_PIVOT_TOL * col_max:
                j = c
                break
        if first < 0:
            return 0
        if j < 0:
            j = first
        _blocking(T, j, nrows, rhs, &best_ratio, &top_pivot, &col_max)
        floor_ = REL_PIVOT_TOL * col_max
        r = -1
        for i in range(nrows):
            a = T[i, j]
            if a > PIVOT_TOL:
                ratio = T[i, rhs] / a
                if ratio != best_ratio:
                    continue
                if bland:
                    # lowest basis index among the ties that are not tiny pivots
                    if a < floor_ and top_pivot >= floor_:
                        continue
                    if r < 0 or basis[i] < basis[r]:
                        r = i
                elif r < 0 or a > T[r, j] or (a == T[r, j] and basis[i] < basis[r]):
                    # largest pivot among ties, then lowest basis index
                    r = i
        if best_ratio <= 0.0:
            streak += 1
        else:
            streak = 0
        _pivot(T, basis, r, j)
        if (it + 1) % REFACTOR_EVERY == 0 and not _refactor(T, A0, basis, cost):
            return -2
    return -2


cdef int _solve_phase(double[:, ::1] T, long[::1] basis, double[:, ::1] A0,
                      double[::1] cost, Py_ssize_t n_allowed, long max_iter) noexcept nogil:
    """Iterate to an optimum, re-deriving the tableau at each claimed stop."""
    cdef Py_ssize_t obj = A0.shape[0]
    cdef Py_ssize_t j
    cdef int status, round_
    cdef bint ok
    for round_ in range(MAX_REFACTOR):
        status = _iterate(T, basis, n_allowed, max_iter, A0, cost)
        if status == -2 or not _refactor(T, A0, basis, cost):
            return -2
        ok = True
        for j in range(n_allowed):
            if T[obj, j] < -COST_TOL:
                ok = False
                break
        if ok:
            return 0
        if status == -1 and round_ > 0:
            return -1
    return -2


def max_slack(G, coupled):
    """Maximize ``d`` subject to ``G[j] . b >= d`` (coupled rows) or
    ``G[j] . b >= 0`` (plain rows) over the probability simplex.

    Returns ``(status, d, b)``.
    """
    cdef const double[:, ::1] g = np.ascontiguousarray(G, dtype=np.float64)
    cdef const double[::1] cp = np.ascontiguousarray(coupled, dtype=np.float64)
    if not np.any(np.asarray(coupled) > 0):
        raise ValueError("at least one row must be coupled to d")
    cdef Py_ssize_t m = g.shape[0]
    cdef Py_ssize_t n = g.shape[1]
    cdef Py_ssize_t ncols = m + n + 2
    cdef Py_ssize_t i, j, s, pick, top_s
    cdef long max_iter = 50 * (ncols + n + 1)
    cdef int status
    cdef double v, mx, best

    T_arr = np.zeros((n + 2, ncols + 1), dtype=np.float64)
    cdef double[:, ::1] T = T_arr
    basis_arr = np.empty(n + 1, dtype=np.int_)
    cdef long[::1] basis = basis_arr
    cost_arr = np.zeros(ncols, dtype=np.float64)
    cdef double[::1] cost = cost_arr
    b_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] b = b_arr

    with nogil:
        for s in range(n):
            for j in range(m):
                T[s, j] = g[j, s]
            T[s, m] = -1.0
            T[s, m + 1] = 1.0
            T[s, m + 2 + s] = 1.0
        for j in range(m):
            T[n, j] = cp[j]
        T[n, ncols] = 1.0
    A0_arr = T_arr[: n + 1].copy()
    cdef double[:, ::1] A0 = A0_arr

    with nogil:
        # feasible start: the coupled row with the smallest max_s G[j, s]
        # carries all the weight, mu sits at that max, slacks fill the rest
        pick = -1
        best = 0.0
        for j in range(m):
            if cp[j] > 0.0:
                mx = g[j, 0] / cp[j]
                for s in range(1, n):
                    v = g[j, s] / cp[j]
                    if v > mx:
                        mx = v
                if pick < 0 or mx < best:
                    pick = j
                    best = mx
        top_s = 0
        mx = g[pick, 0] / cp[pick]
        for s in range(1, n):
            v = g[pick, s] / cp[pick]
            if v > mx:
                mx = v
                top_s = s
        for s in range(n):
            basis[s] = m + 2 + s
        basis[top_s] = m if best >= 0.0 else m + 1
        basis[n] = pick

        # minimize mu+ - mu-, written as maximizing its negation
        cost[m] = -1.0
        cost[m + 1] = 1.0
        if _refactor(T, A0, basis, cost):
            status = _solve_phase(T, basis, A0, cost, ncols, max_iter)
        else:
            status = -2

    if status == -1:
        return INFEASIBLE, 0.0, b_arr
    if status != 0:
        return NUMERICAL, 0.0, b_arr
    for s in range(n):
        b[s] = T[n + 1, m + 2 + s]
    return OPTIMAL, -T[n + 1, ncols], b_arr
