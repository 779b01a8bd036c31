"""Pure-Python/numpy implementation of the max-slack simplex kernel.

Mirrors ``_simplex.pyx`` operation for operation; the two must agree on
status, objective and witness for every input.
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
INFEASIBLE = 1
NUMERICAL = 2

PIVOT_TOL = 1e-10
COST_TOL = 1e-10
DEGENERATE_STREAK = 25
MAX_REFACTOR = 5
SINGULAR_TOL = 1e-14
REFACTOR_EVERY = 64
REL_PIVOT_TOL = 1e-8
MAX_REJECT = 8


def _build_tableau(G, coupled):
    """Dual tableau: columns lambda (m), mu+, mu-, sigma (n); rows one per
    belief coordinate plus the convexity row, then the objective row."""
    m, n = G.shape
    ncols = m + n + 2
    T = np.zeros((n + 2, ncols + 1))
    T[:n, :m] = G.T
    T[:n, m] = -1.0
    T[:n, m + 1] = 1.0
    T[np.arange(n), m + 2 + np.arange(n)] = 1.0
    T[n, :m] = coupled
    T[n, ncols] = 1.0
    return T


def _crash_basis(G, coupled):
    """A feasible starting basis: the coupled row j with the smallest
    ``max_s G[j, s]`` carries all the weight, ``mu`` takes the value of
    that max in its argmax coordinate, and slacks fill the rest."""
    m, n = G.shape
    rows = np.flatnonzero(coupled > 0)
    scaled = G[rows] / coupled[rows, None]
    top = scaled.max(axis=1)
    k = int(np.argmin(top))
    j = int(rows[k])
    s = int(np.argmax(scaled[k]))
    basis = m + 2 + np.arange(n + 1)
    basis[s] = m if top[k] >= 0.0 else m + 1
    basis[n] = j
    return basis


def _pivot(T, basis, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    basis[r] = j


def _candidates(reduced, bland):
    """Entering columns to try, best first: lowest index under Bland,
    most negative reduced cost (then lowest index) otherwise."""
    idx = np.flatnonzero(reduced < -COST_TOL)
    if not bland:
        idx = idx[np.lexsort((idx, reduced[idx]))]
    return idx[:MAX_REJECT]


def _iterate(T, basis, n_allowed, max_iter, A0, cost):
    """Run primal simplex on T until optimal; -1 unbounded, -2 iteration cap
    or singular basis. The tableau is rebuilt every REFACTOR_EVERY pivots."""
    nrows = T.shape[0] - 1
    rhs = T.shape[1] - 1
    obj = T[nrows]
    streak = 0
    for it in range(max_iter):
        bland = streak > DEGENERATE_STREAK
        cands = _candidates(obj[:n_allowed], bland)
        if cands.size == 0:
            return 0
        # a column whose blocking pivot is tiny next to the rest of the
        # column would leave the basis near singular; pass it over
        j = -1
        for c in cands:
            col = T[:nrows, c]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return -1
            ratios = T[rows, rhs] / col[rows]
            if col[rows[ratios <= ratios.min()]].max() >= REL_PIVOT_TOL * np.abs(col).max():
                j = int(c)
                break
        if j < 0:
            j = int(cands[0])
        col = T[:nrows, j]
        rows = np.flatnonzero(col > PIVOT_TOL)
        ratios = T[rows, rhs] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best]
        if bland:
            # lowest basis index among the ties that are not tiny pivots
            sound = tied[col[tied] >= REL_PIVOT_TOL * np.abs(col).max()]
            if sound.size:
                tied = sound
            r = int(tied[np.argmin(basis[tied])])
        else:
            # largest pivot among ties, then lowest basis index
            piv = col[tied]
            top = tied[piv >= piv.max()]
            r = int(top[np.argmin(basis[top])])
        streak = streak + 1 if best <= 0.0 else 0
        _pivot(T, basis, r, j)
        if (it + 1) % REFACTOR_EVERY == 0 and not refactor(A0, basis, cost, T):
            return -2
    return -2


def refactor(A0, basis, cost, T):
    """Rebuild tableau rows and the objective row from the original data.

    Gauss-Jordan on the basis columns with partial pivoting; drift from
    earlier pivots is discarded. Returns False for a singular basis.
    """
    rows = A0.shape[0]
    T[:rows] = A0
    for idx in range(rows):
        j = basis[idx]
        mag = np.abs(T[idx:rows, j])
        p = idx + int(np.argmax(mag))
        if mag[p - idx] < SINGULAR_TOL:
            return False
        if p != idx:
            T[[idx, p]] = T[[p, idx]]
        _pivot(T, basis, idx, j)
    acc = np.zeros(T.shape[1])
    for i in range(rows):
        acc += cost[basis[i]] * T[i]
    acc[: cost.shape[0]] -= cost
    T[rows] = acc
    return True


def solve_phase(T, basis, A0, cost, n_allowed, max_iter):
    """Iterate to an optimum, re-deriving the tableau at each claimed stop.

    0 optimal, -1 unbounded (confirmed on a fresh tableau), -2 failure.
    """
    for round_ in range(MAX_REFACTOR):
        status = _iterate(T, basis, n_allowed, max_iter, A0, cost)
        if status == -2 or not refactor(A0, basis, cost, T):
            return -2
        if np.all(T[-1, :n_allowed] >= -COST_TOL):
            return 0
        if status == -1 and round_ > 0:
            return -1
    return -2


def max_slack(G, coupled):
    """Maximize ``d`` subject to ``G[j] . b >= d`` (coupled rows) or
    ``G[j] . b >= 0`` (plain rows) over the probability simplex.

    Solved through the dual, which has ``n + 1`` rows regardless of the
    number of constraints. Returns ``(status, d, b)``.
    """
    G = np.ascontiguousarray(G, dtype=np.float64)
    coupled = np.ascontiguousarray(coupled, dtype=np.float64)
    m, n = G.shape
    if not np.any(np.asarray(coupled) > 0):
        raise ValueError("at least one row must be coupled to d")
    T = _build_tableau(G, coupled)
    A0 = T[: n + 1].copy()
    ncols = T.shape[1] - 1
    max_iter = 50 * (ncols + n + 1)
    basis = _crash_basis(G, coupled)
    # minimize mu+ - mu-, written as maximizing its negation
    cost = np.zeros(ncols)
    cost[m] = -1.0
    cost[m + 1] = 1.0
    if not refactor(A0, basis, cost, T):
        return NUMERICAL, 0.0, np.zeros(n)
    status = solve_phase(T, basis, A0, cost, ncols, max_iter)
    if status == -1:
        return INFEASIBLE, 0.0, np.zeros(n)
    if status != 0:
        return NUMERICAL, 0.0, np.zeros(n)
    d = -T[n + 1, ncols]
    b = T[n + 1, m + 2 : m + 2 + n].copy()
    return OPTIMAL, float(d), b
