"""Alpha-vector arithmetic: sets, cross-sums, dominance and tie-breaking.

A :class:`VectorSet` stores its members as the rows of a read-only matrix
kept in lexicographic order, so index order *is* the ``<_lex`` order and
every derived result is canonical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

import numpy as np

BELIEF_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AlphaVector:
    """One linear piece of a value function, with optional provenance."""

    values: np.ndarray
    tag: Any = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("alpha vector must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(v)):
            raise ValueError("alpha vector entries must be finite")
        object.__setattr__(self, "values", _frozen(v))

    def __len__(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlphaVector):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __repr__(self) -> str:
        return f"AlphaVector({self.values.tolist()!r}, tag={self.tag!r})"


@dataclass(frozen=True, eq=False)
class Belief:
    """A probability distribution over states."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("belief must be a non-empty 1-d sequence")
        if np.any(p < -BELIEF_TOL) or np.any(p > 1 + BELIEF_TOL):
            raise ValueError(f"belief entries must lie in [0, 1]: {p}")
        if abs(p.sum() - 1.0) > BELIEF_TOL:
            raise ValueError(f"belief must sum to 1 (got {p.sum()!r})")
        object.__setattr__(self, "probs", _frozen(p))

    def __len__(self) -> int:
        return self.probs.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)

    @classmethod
    def uniform(cls, n: int) -> "Belief":
        return cls(np.full(n, 1.0 / n))


def _tag_key(tag):
    # None sorts first; everything else by its natural order
    return (0,) if tag is None else (1, tag)


class VectorSet:
    """A finite set of equal-length alpha vectors.

    Exact duplicates are merged at construction (the smallest tag wins) and
    members are stored in lexicographic order.
    """

    __slots__ = ("matrix", "tags")

    def __init__(self, vectors: Any, tags: Sequence[Any] | None = None, *, dim: int | None = None):
        if isinstance(vectors, VectorSet):
            tags = vectors.tags if tags is None else tags
            vectors = vectors.matrix
        elif not isinstance(vectors, np.ndarray):
            vectors = list(vectors)
            if tags is None and vectors and all(isinstance(v, AlphaVector) for v in vectors):
                tags = [v.tag for v in vectors]
            vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
            if not vectors:
                vectors = np.empty((0, dim or 0))
        M = np.asarray(vectors, dtype=np.float64)
        if M.ndim == 1 and M.size == 0:
            M = M.reshape(0, dim or 0)
        if M.ndim != 2:
            raise ValueError("vector set must be a 2-d array of row vectors")
        if dim is not None and M.shape[1] != dim:
            raise ValueError(f"dimension mismatch: expected {dim}, got {M.shape[1]}")
        if not np.all(np.isfinite(M)):
            raise ValueError("vector entries must be finite")
        if tags is not None:
            tags = list(tags)
            if len(tags) != M.shape[0]:
                raise ValueError("one tag per vector required")

        if M.shape[0] > 1:
            order = np.lexsort(M.T[::-1])
            M = M[order]
            if tags is not None:
                tags = [tags[i] for i in order]
            same = np.all(M[1:] == M[:-1], axis=1)
            if same.any():
                keep = np.concatenate(([True], ~same))
                if tags is not None:
                    merged = []
                    for i, t in enumerate(tags):
                        if keep[i]:
                            merged.append(t)
                        elif _tag_key(t) < _tag_key(merged[-1]):
                            merged[-1] = t
                    tags = merged
                M = M[keep]
        self.matrix = _frozen(M)
        self.tags = tuple(tags) if tags is not None else None

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def __iter__(self) -> Iterator[AlphaVector]:
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i: int) -> AlphaVector:
        return AlphaVector(self.matrix[i], None if self.tags is None else self.tags[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorSet):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(np.array_equal(self.matrix, other.matrix))

    def __repr__(self) -> str:
        return f"VectorSet({self.matrix.tolist()!r})"

    def subset(self, indices: Iterable[int]) -> "VectorSet":
        idx = np.fromiter(indices, dtype=np.int64)
        tags = None if self.tags is None else [self.tags[i] for i in idx]
        return VectorSet(self.matrix[idx].reshape(-1, self.dim), tags)

    def translate(self, offset: np.ndarray) -> "VectorSet":
        return VectorSet(self.matrix + np.asarray(offset, dtype=np.float64), self.tags)

    def values_at(self, b) -> np.ndarray:
        return self.matrix @ np.asarray(b, dtype=np.float64)

    def value(self, b) -> float:
        """Upper envelope max_v b.v at belief ``b``."""
        return float(self.values_at(b).max())


def _check_dim(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"dimension mismatch: {a} vs {b}")


def dot(b, v) -> float:
    b = np.asarray(b, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    _check_dim(b.shape[0], v.shape[0])
    return float(b @ v)


def cross_sum(U: VectorSet, W: VectorSet) -> VectorSet:
    """All pairwise sums ``u + w``, tagged ``(i, j)`` by source row."""
    if len(U) == 0 or len(W) == 0:
        raise ValueError("cross-sum operands must be non-empty")
    _check_dim(U.dim, W.dim)
    M = (U.matrix[:, None, :] + W.matrix[None, :, :]).reshape(-1, U.dim)
    tags = [(i, j) for i in range(len(U)) for j in range(len(W))]
    return VectorSet(M, tags)


def pointwise_dominate(w, U: VectorSet | np.ndarray) -> bool:
    M = U.matrix if isinstance(U, VectorSet) else np.asarray(U, dtype=np.float64)
    if M.shape[0] == 0:
        return False
    w = np.asarray(w, dtype=np.float64)
    _check_dim(w.shape[0], M.shape[1])
    return bool(np.any(np.all(w <= M, axis=1)))


def lex_less(u, w) -> bool:
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    _check_dim(u.shape[0], w.shape[0])
    diff = np.flatnonzero(u != w)
    return bool(diff.size and u[diff[0]] < w[diff[0]])


def best_index(b, M: np.ndarray, alive: np.ndarray | None = None) -> int:
    """Row of lexicographically sorted ``M`` maximizing ``b . row``.

    Values within rounding noise of the maximum count as tied; the earliest
    (lexicographically smallest) tied row wins.
    """
    vals = M @ np.asarray(b, dtype=np.float64)
    if alive is not None:
        vals = np.where(alive, vals, -np.inf)
    top = vals.max()
    if not np.isfinite(top):
        raise ValueError("no candidate vectors")
    tied = vals >= top - 1e-12 * max(1.0, abs(top))
    return int(np.argmax(tied))


def best(b, U: VectorSet) -> AlphaVector:
    if len(U) == 0:
        raise ValueError("best() of an empty vector set")
    b = np.asarray(b, dtype=np.float64)
    _check_dim(b.shape[0], U.dim)
    return U[best_index(b, U.matrix)]


@dataclass(frozen=True, eq=False)
class RegionConstraintSet:
    """Difference vectors ``u - u'`` whose positive half-spaces cut out a region.

    ``provenance[k]`` is ``(set_id, i, i')`` for the row ``U[i] - U[i']``.
    Intersection concatenates constraints.
    """

    matrix: np.ndarray
    provenance: tuple = field(default=())

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=np.float64)
        if M.ndim != 2:
            raise ValueError("region constraints must be a 2-d array")
        object.__setattr__(self, "matrix", _frozen(M))

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def whole(cls, dim: int) -> "RegionConstraintSet":
        return cls(np.empty((0, dim)))

    @classmethod
    def of(cls, U: VectorSet, index: int, set_id: int = 0) -> "RegionConstraintSet":
        """Witness region of ``U[index]`` relative to the rest of ``U``."""
        others = [j for j in range(len(U)) if j != index]
        M = U.matrix[index] - U.matrix[others]
        return cls(M.reshape(-1, U.dim), tuple((set_id, index, j) for j in others))

    def __and__(self, other: "RegionConstraintSet") -> "RegionConstraintSet":
        _check_dim(self.dim, other.dim)
        return RegionConstraintSet(np.vstack([self.matrix, other.matrix]), self.provenance + other.provenance)

    intersect = __and__


def format_vector_set(V: VectorSet) -> str:
    """One vector per line, 17 significant digits, lexicographic order."""
    return "".join(" ".join(f"{x:.17g}" for x in row) + "\n" for row in V.matrix)


def parse_vector_set(text: str) -> VectorSet:
    rows = [[float(t) for t in line.split()] for line in text.splitlines() if line.strip()]
    return VectorSet(np.array(rows, dtype=np.float64) if rows else np.empty((0, 0)))


def sets_close(A: VectorSet | np.ndarray, B: VectorSet | np.ndarray, tol: float = 1e-6) -> bool:
    """Set equality up to a coordinatewise tolerance (one-to-one matching)."""
    MA = A.matrix if isinstance(A, VectorSet) else np.asarray(A)
    MB = B.matrix if isinstance(B, VectorSet) else np.asarray(B)
    if MA.shape != MB.shape:
        return False
    free = np.ones(MB.shape[0], dtype=bool)
    for row in MA:
        hit = np.flatnonzero(free & np.all(np.abs(MB - row) <= tol, axis=1))
        if hit.size == 0:
            return False
        free[hit[0]] = False
    return True
