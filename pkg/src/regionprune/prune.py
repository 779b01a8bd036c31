"""Set minimization: the global PR operator and its region-restricted form."""

from __future__ import annotations

import numpy as np

from .geometry import RegionConstraintSet, VectorSet, best_index
from .lp import DEFAULT_TOL, LpStats, dominance_margin, _max_slack

__all__ = ["RegionConstraintSet", "pr", "pr_indices", "pr_region", "pr_region_indices", "region"]


def region(U: VectorSet, index: int, set_id: int = 0) -> RegionConstraintSet:
    return RegionConstraintSet.of(U, index, set_id)


def pr_indices(M: np.ndarray, tol: float = DEFAULT_TOL, stats: LpStats | None = None) -> list[int]:
    """Rows of the lexicographically sorted matrix ``M`` that survive pruning.

    Candidates are examined in row order; a pointwise dominance check
    against the kept set comes first and costs no LP.
    """
    k, n = M.shape
    alive = np.ones(k, dtype=bool)
    kept: list[int] = []
    D = np.empty((k, n))
    nd = 0
    cursor = 0
    while True:
        while cursor < k and not alive[cursor]:
            cursor += 1
        if cursor == k:
            break
        w = M[cursor]
        if nd and np.any(np.all(w <= D[:nd], axis=1)):
            alive[cursor] = False
            continue
        d, b = dominance_margin(w, D[:nd], stats)
        if d <= tol:
            alive[cursor] = False
            continue
        x = best_index(b, M, alive)
        alive[x] = False
        kept.append(x)
        D[nd] = M[x]
        nd += 1
    kept.sort()
    return kept


def pr(W: VectorSet, tol: float = DEFAULT_TOL, stats: LpStats | None = None) -> VectorSet:
    """The unique minimal subset of ``W`` with the same upper envelope."""
    if len(W) == 0:
        raise ValueError("pr() of an empty vector set")
    return W.subset(pr_indices(W.matrix, tol, stats))


def pr_region_indices(
    R: np.ndarray, M: np.ndarray, tol: float = DEFAULT_TOL, stats: LpStats | None = None
) -> list[int]:
    """Rows of ``M`` whose witness regions (relative to ``M``) meet the
    interior of the region cut out by constraint rows ``R``."""
    k, n = M.shape
    R = R.reshape(-1, n)
    alive = np.ones(k, dtype=bool)
    kept: list[int] = []
    cursor = 0
    while True:
        while cursor < k and not alive[cursor]:
            cursor += 1
        if cursor == k:
            break
        w = M[cursor]
        if kept:
            G = np.vstack([R, w - M[kept]])
        else:
            G = R
        d, b = _max_slack(G, stats)
        if d <= tol:
            if not kept:
                # empty D: this LP only probed the region itself
                return []
            alive[cursor] = False
            continue
        x = best_index(b, M, alive)
        alive[x] = False
        kept.append(x)
    kept.sort()
    return kept


def pr_region(
    R: RegionConstraintSet, W: VectorSet, tol: float = DEFAULT_TOL, stats: LpStats | None = None
) -> VectorSet:
    """Members of ``W`` not dominated by ``W`` over the interior of ``R``."""
    if len(W) == 0:
        raise ValueError("pr_region() of an empty vector set")
    if R.dim != W.dim:
        raise ValueError(f"dimension mismatch: {R.dim} vs {W.dim}")
    return W.subset(pr_region_indices(R.matrix, W.matrix, tol, stats))
