"""Reference implementations that share no code with the package.

LPs go through scipy's HiGHS; belief updates and the horizon-h value are
recomputed from the raw model arrays.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog


def max_slack(G) -> float:
    """max d s.t. G b >= d, b on the simplex (inf for no rows)."""
    G = np.asarray(G, dtype=float)
    m, n = G.shape
    if m == 0:
        return float("inf")
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.hstack([-G, np.ones((m, 1))]),
        b_ub=np.zeros(m),
        A_eq=np.r_[np.ones(n), 0.0][None, :],
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)],
        method="highs",
    )
    assert res.status == 0, res.message
    return -res.fun


def margin(w, U) -> float:
    """max over beliefs of (b.w - max_u b.u)."""
    U = np.asarray(U, dtype=float).reshape(-1, len(w))
    return max_slack(np.asarray(w, dtype=float) - U)


def prune(M, tol=1e-7) -> np.ndarray:
    """Minimal set by brute force: keep a row iff it beats all other
    distinct rows somewhere by more than ``tol``."""
    M = np.unique(np.asarray(M, dtype=float), axis=0)
    keep = [i for i in range(len(M)) if margin(M[i], np.delete(M, i, axis=0)) > tol]
    return M[keep]


def full_cross_sum(sets) -> np.ndarray:
    mats = [np.asarray(V.matrix if hasattr(V, "matrix") else V, dtype=float) for V in sets]
    return np.array([np.sum(rows, axis=0) for rows in itertools.product(*mats)])


def simplex_grid(n: int, steps: int) -> np.ndarray:
    """All beliefs with coordinates in multiples of 1/steps."""
    pts = [c for c in itertools.product(range(steps + 1), repeat=n - 1) if sum(c) <= steps]
    return np.array([[*c, steps - sum(c)] for c in pts], dtype=float) / steps


def expectimax(T, O, R, beta, b, horizon, terminal):
    """Horizon-h optimal value at belief b by explicit tree enumeration.

    ``terminal`` is the alpha vector giving the value at the leaves.
    """
    b = np.asarray(b, dtype=float)
    if horizon == 0:
        return float(b @ terminal)
    A, S, _ = T.shape
    Z = O.shape[2]
    best = -np.inf
    for a in range(A):
        q = sum(b[s] * R[a, s] for s in range(S))
        for z in range(Z):
            nxt = np.array([O[a, s2, z] * sum(T[a, s, s2] * b[s] for s in range(S)) for s2 in range(S)])
            p = nxt.sum()
            if p > 0:
                q += beta * p * expectimax(T, O, R, beta, nxt / p, horizon - 1, terminal)
        best = max(best, q)
    return best


def rows_match(A, B, tol=1e-6) -> bool:
    """Order-free equality of two row sets up to ``tol``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        return False
    used = np.zeros(len(B), dtype=bool)
    for row in A:
        hit = np.flatnonzero(~used & np.all(np.abs(B - row) <= tol, axis=1))
        if not hit.size:
            return False
        used[hit[0]] = True
    return True
