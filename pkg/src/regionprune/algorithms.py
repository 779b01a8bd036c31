"""Pruned cross-sums PR(V_1 + ... + V_k) by four strategies.

``naive``  prune the full cross-sum at once.
``gip``    incremental pruning, each LP using the smallest of the plain,
           fix-u and fix-w constraint sets.
``ibip``   enumerate tuples of witness regions with a common interior point.
``rbip``   the same tuples, found by region-restricted pruning.

All four return the same set; they differ in LP count and LP size.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import VectorSet, best_index
from .lp import DEFAULT_TOL, LpStats, _max_slack
from .prune import pr, pr_indices, pr_region_indices

log = logging.getLogger(__name__)

ALGORITHMS = ("naive", "gip", "ibip", "rbip")
ORDERINGS = ("as-given", "ascending-size", "descending-size")


@dataclass(frozen=True)
class PrunerConfig:
    algorithm: str = "rbip"
    set_ordering: str = "ascending-size"
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.set_ordering not in ORDERINGS:
            raise ValueError(f"unknown set ordering {self.set_ordering!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


def _check_sets(sets: Sequence[VectorSet]) -> list[VectorSet]:
    sets = list(sets)
    if not sets:
        raise ValueError("at least one vector set required")
    if any(len(V) == 0 for V in sets):
        raise ValueError("vector sets must be non-empty")
    dims = {V.dim for V in sets}
    if len(dims) != 1:
        raise ValueError(f"vector sets of mixed dimension: {sorted(dims)}")
    return sets


def _order(sets: list[VectorSet], ordering: str) -> list[int]:
    idx = list(range(len(sets)))
    if ordering == "ascending-size":
        idx.sort(key=lambda i: len(sets[i]))
    elif ordering == "descending-size":
        idx.sort(key=lambda i: -len(sets[i]))
    return idx


def _fold_singletons(sets: list[VectorSet], ordering: str):
    """Split off singleton sets (their one region is the whole simplex, so
    they only translate the result); order the rest."""
    fixed: dict[int, int] = {}
    rest: list[int] = []
    for i in _order(sets, ordering):
        if len(sets[i]) == 1:
            fixed[i] = 0
        else:
            rest.append(i)
    return fixed, rest


def _assemble(sets: list[VectorSet], tuples) -> VectorSet:
    """Sum one vector per set for every tuple (tuples map set index -> row)."""
    k = len(sets)
    if not tuples:
        return VectorSet(np.empty((0, sets[0].dim)))
    idx = np.array([[t[i] for i in range(k)] for t in tuples], dtype=np.int64)
    M = np.zeros((len(tuples), sets[0].dim))
    for i, V in enumerate(sets):
        M += V.matrix[idx[:, i]]
    return VectorSet(M, [tuple(int(x) for x in row) for row in idx])


def _single(sets, fixed, rest, tol, stats) -> VectorSet:
    if not rest:
        return _assemble(sets, [dict(fixed)])
    (r,) = rest
    keep = pr_indices(sets[r].matrix, tol, stats)
    return _assemble(sets, [{**fixed, r: j} for j in keep])


def naive_prune(sets: Sequence[VectorSet], tol: float = DEFAULT_TOL, stats: LpStats | None = None) -> VectorSet:
    """PR of the fully enumerated cross-sum."""
    sets = _check_sets(sets)
    n = sets[0].dim
    grids = np.meshgrid(*[np.arange(len(V)) for V in sets], indexing="ij")
    idx = np.stack([g.reshape(-1) for g in grids], axis=1)
    M = np.zeros((idx.shape[0], n))
    for i, V in enumerate(sets):
        M += V.matrix[idx[:, i]]
    full = VectorSet(M, [tuple(int(x) for x in row) for row in idx])
    return pr(full, tol, stats)


# -- generalized incremental pruning -----------------------------------------


def _gip_pair(U: np.ndarray, W: np.ndarray, tol: float, stats: LpStats | None):
    """PR(U + W) for minimal U, W; returns kept (i, j) source pairs."""
    nu, nw = U.shape[0], W.shape[0]
    n = U.shape[1]
    pairs = VectorSet(
        (U[:, None, :] + W[None, :, :]).reshape(-1, n),
        [(i, j) for i in range(nu) for j in range(nw)],
    )
    M = pairs.matrix
    tags = pairs.tags
    k = M.shape[0]
    alive = np.ones(k, dtype=bool)
    D = np.empty((k, n))
    nd = 0
    kept: list[int] = []
    by_u: dict[int, list[int]] = {}
    by_w: dict[int, list[int]] = {}
    cursor = 0
    while True:
        while cursor < k and not alive[cursor]:
            cursor += 1
        if cursor == k:
            break
        x = M[cursor]
        i, j = tags[cursor]
        same_w = by_w.get(j, [])
        same_u = by_u.get(i, [])
        size_d = nd
        size_fix_u = (nw - 1) + len(same_w)
        size_fix_w = (nu - 1) + len(same_u)
        smallest = min(size_d, size_fix_u, size_fix_w)
        # the chosen set serves both the pointwise test and the LP
        if smallest == size_d:
            rivals = D[:nd]
            G = x - rivals
        elif smallest == size_fix_u:
            # u + w' for the other w', and u' + w already kept
            rivals = np.vstack([U[i] + np.delete(W, j, axis=0), U[same_w] + W[j]])
            G = np.vstack([W[j] - np.delete(W, j, axis=0), U[i] - U[same_w]])
        else:
            rivals = np.vstack([np.delete(U, i, axis=0) + W[j], U[i] + W[same_u]])
            G = np.vstack([U[i] - np.delete(U, i, axis=0), W[j] - W[same_u]])
        if rivals.shape[0] and np.any(np.all(x <= rivals, axis=1)):
            alive[cursor] = False
            continue
        d, b = _max_slack(G.reshape(-1, n), stats)
        if d <= tol:
            alive[cursor] = False
            continue
        y = best_index(b, M, alive)
        alive[y] = False
        kept.append(y)
        D[nd] = M[y]
        nd += 1
        yi, yj = tags[y]
        by_u.setdefault(yi, []).append(yj)
        by_w.setdefault(yj, []).append(yi)
    return [tags[y] for y in sorted(kept)]


def gip_prune(
    sets: Sequence[VectorSet],
    tol: float = DEFAULT_TOL,
    stats: LpStats | None = None,
    ordering: str = "ascending-size",
) -> VectorSet:
    """Incremental pruning PR(V_1 + PR(V_2 + ... PR(V_{k-1} + V_k)))."""
    sets = _check_sets(sets)
    fixed, rest = _fold_singletons(sets, ordering)
    if len(rest) <= 1:
        return _single(sets, fixed, rest, tol, stats)
    # partial result: matrix of sums plus, per row, the source tuple
    last = rest[-1]
    acc = sets[last].matrix
    acc_tuples = [{last: j} for j in range(len(sets[last]))]
    for r in reversed(rest[:-1]):
        kept = _gip_pair(sets[r].matrix, acc, tol, stats)
        acc = np.array([sets[r].matrix[i] + acc[j] for i, j in kept])
        acc_tuples = [{**acc_tuples[j], r: i} for i, j in kept]
    return _assemble(sets, [{**fixed, **t} for t in acc_tuples])


# -- intersection-based incremental pruning ----------------------------------


def _regions(V: np.ndarray) -> list[np.ndarray]:
    return [V[i] - np.delete(V, i, axis=0) for i in range(V.shape[0])]


def ibip_prune(
    sets: Sequence[VectorSet],
    tol: float = DEFAULT_TOL,
    stats: LpStats | None = None,
    ordering: str = "ascending-size",
) -> VectorSet:
    """Tuples of mutually intersecting witness regions, found recursively:
    every region of V_1 is tested against every tuple found for V_2..V_k;
    the last pair is enumerated exhaustively."""
    sets = _check_sets(sets)
    fixed, rest = _fold_singletons(sets, ordering)
    if len(rest) <= 1:
        return _single(sets, fixed, rest, tol, stats)
    regions = {r: _regions(sets[r].matrix) for r in rest}

    def intersecting(pos: int):
        r = rest[pos]
        if pos == len(rest) - 2:
            r2 = rest[pos + 1]
            deeper = [({r2: j}, regions[r2][j]) for j in range(len(sets[r2]))]
        else:
            deeper = intersecting(pos + 1)
        found = []
        for i, Ri in enumerate(regions[r]):
            for tup, C in deeper:
                G = np.vstack([Ri, C])
                d, _ = _max_slack(G, stats)
                if d > tol:
                    found.append(({**tup, r: i}, G))
        return found

    tuples = [{**fixed, **t} for t, _ in intersecting(0)]
    return _assemble(sets, tuples)


# -- region-based incremental pruning ----------------------------------------


def rbip_prune(
    sets: Sequence[VectorSet],
    tol: float = DEFAULT_TOL,
    stats: LpStats | None = None,
    ordering: str = "ascending-size",
) -> VectorSet:
    """Intersecting-region tuples via region-restricted pruning.

    For each v in the last set, every other set is narrowed to the members
    whose regions meet the current region intersected with v's region; the
    recursion continues on the narrowed sets.
    """
    sets = _check_sets(sets)
    fixed, rest = _fold_singletons(sets, ordering)
    if len(rest) <= 1:
        return _single(sets, fixed, rest, tol, stats)
    n = sets[0].dim

    def intersecting(R: np.ndarray, group: list[tuple[int, np.ndarray, np.ndarray]]):
        # group entries: (set position, original row ids, narrowed matrix)
        if len(group) == 1:
            r, ids, V = group[0]
            return [{r: int(ids[j])} for j in pr_region_indices(R, V, tol, stats)]
        r_t, ids_t, V_t = group[-1]
        found = []
        for v in range(V_t.shape[0]):
            Rv = np.vstack([R, V_t[v] - np.delete(V_t, v, axis=0)])
            narrowed = []
            for r, ids, V in group[:-1]:
                keep = pr_region_indices(Rv, V, tol, stats)
                if not keep:
                    break
                narrowed.append((r, ids[keep], V[keep]))
            else:
                for tup in intersecting(Rv, narrowed):
                    tup[r_t] = int(ids_t[v])
                    found.append(tup)
        return found

    group = [(r, np.arange(len(sets[r])), sets[r].matrix) for r in rest]
    tuples = [{**fixed, **t} for t in intersecting(np.empty((0, n)), group)]
    return _assemble(sets, tuples)


PRUNERS: dict[str, Callable[..., VectorSet]] = {
    "naive": naive_prune,
    "gip": gip_prune,
    "ibip": ibip_prune,
    "rbip": rbip_prune,
}


def prune_cross_sum(sets: Sequence[VectorSet], config: PrunerConfig = PrunerConfig(), stats: LpStats | None = None) -> VectorSet:
    if config.algorithm == "naive":
        return naive_prune(sets, config.tol, stats)
    return PRUNERS[config.algorithm](sets, config.tol, stats, ordering=config.set_ordering)
