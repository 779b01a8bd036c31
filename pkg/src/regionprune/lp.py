"""The three linear programs of cross-sum pruning, all over the belief simplex.

Every LP here has the shape

    maximize d  s.t.  b . g >= d   (slack-coupled rows)
                      b . g >= 0   (plain rows)
                      sum(b) = 1, b >= 0

Open-set conditions ("b . g > 0") are certified by a positive optimum of
the shared slack: the answer is yes iff ``d > tol``.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from . import _kernels
from .geometry import RegionConstraintSet, VectorSet

DEFAULT_TOL = 1e-7
WITNESS_TOL = 1e-7


class LpNumericalError(ArithmeticError):
    """The simplex kernel hit its iteration cap or lost feasibility."""


class LpTimeout(TimeoutError):
    """Raised from inside a run once its :class:`LpStats` deadline passes."""


class ConstraintKind(str, Enum):
    SLACK = "slack-coupled"
    PLAIN = "plain-nonneg"


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: np.ndarray
    kind: ConstraintKind = ConstraintKind.SLACK


@dataclass
class LpInstance:
    coeffs: np.ndarray
    coupled: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.ndim != 2 or self.coeffs.shape[1] < 1:
            raise ValueError("constraint matrix must be (m, n) with n >= 1")
        self.coupled = np.asarray(self.coupled, dtype=bool).reshape(-1)
        if self.coupled.shape[0] != self.coeffs.shape[0]:
            raise ValueError("one kind flag per constraint row")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("constraint coefficients must be finite")

    @classmethod
    def from_constraints(cls, dimension: int, constraints: Sequence[LinearConstraint]) -> "LpInstance":
        if not constraints:
            return cls(np.empty((0, dimension)), np.empty(0, dtype=bool))
        return cls(
            np.vstack([np.asarray(c.coeffs, dtype=np.float64) for c in constraints]),
            [c.kind == ConstraintKind.SLACK for c in constraints],
        )

    @classmethod
    def max_slack(cls, coeffs: np.ndarray) -> "LpInstance":
        coeffs = np.asarray(coeffs, dtype=np.float64)
        return cls(coeffs, np.ones(coeffs.shape[0], dtype=bool))

    @property
    def dimension(self) -> int:
        return self.coeffs.shape[1]

    @property
    def has_objective_d(self) -> bool:
        return bool(self.coupled.any())

    def __len__(self) -> int:
        return self.coeffs.shape[0]


@dataclass(frozen=True)
class LpOutcome:
    status: str
    d: float = float("nan")
    witness: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass
class LpStats:
    """Cumulative LP counters. Only difference-vector rows are counted as
    constraints; the simplex conditions are implicit."""

    lp_count: int = 0
    constraint_total: int = 0
    wall_time: float = 0.0
    max_constraints: int = 0
    histogram: Counter = field(default_factory=Counter)
    deadline: float | None = None

    def record(self, n_constraints: int, elapsed: float) -> None:
        self.lp_count += 1
        self.constraint_total += n_constraints
        self.wall_time += elapsed
        self.histogram[n_constraints] += 1
        if n_constraints > self.max_constraints:
            self.max_constraints = n_constraints
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise LpTimeout("LP budget exhausted")

    def merge(self, other: "LpStats") -> None:
        self.lp_count += other.lp_count
        self.constraint_total += other.constraint_total
        self.wall_time += other.wall_time
        self.histogram.update(other.histogram)
        self.max_constraints = max(self.max_constraints, other.max_constraints)

    def as_dict(self) -> dict:
        return {
            "lp_count": self.lp_count,
            "constraint_total": self.constraint_total,
            "wall_time": self.wall_time,
            "max_constraints": self.max_constraints,
        }


def _clean_witness(b: np.ndarray) -> np.ndarray:
    if np.any(b < -WITNESS_TOL) or abs(b.sum() - 1.0) > WITNESS_TOL:
        raise LpNumericalError(f"witness left the simplex: {b}")
    b = np.clip(b, 0.0, None)
    return b / b.sum()


def solve(lp: LpInstance, stats: LpStats | None = None) -> LpOutcome:
    """Solve one max-slack LP; counts it in ``stats``.

    With no slack-coupled rows the objective is unbounded whenever the plain
    rows are feasible; that case reports ``d = inf`` and a feasible witness.
    """
    n = lp.dimension
    t0 = time.perf_counter()
    if len(lp) == 0:
        out = LpOutcome("optimal", float("inf"), np.full(n, 1.0 / n))
    elif not lp.has_objective_d:
        status, d, b = _kernels.max_slack(lp.coeffs, np.ones(len(lp)))
        if status == _kernels.NUMERICAL:
            raise LpNumericalError("simplex kernel failed")
        out = LpOutcome("optimal", float("inf"), _clean_witness(b)) if d >= -1e-9 else LpOutcome("infeasible")
    else:
        status, d, b = _kernels.max_slack(lp.coeffs, lp.coupled.astype(np.float64))
        if status == _kernels.NUMERICAL:
            raise LpNumericalError("simplex kernel failed")
        if status == _kernels.INFEASIBLE:
            out = LpOutcome("infeasible")
        else:
            out = LpOutcome("optimal", float(d), _clean_witness(b))
    if stats is not None:
        stats.record(len(lp), time.perf_counter() - t0)
    return out


def _max_slack(G: np.ndarray, stats: LpStats | None) -> tuple[float, np.ndarray | None]:
    # hot path of every pruning loop: all rows coupled, so always feasible
    m, n = G.shape
    t0 = time.perf_counter()
    if m == 0:
        d, b = float("inf"), np.full(n, 1.0 / n)
    else:
        status, d, b = _kernels.max_slack(G, np.ones(m))
        if status != _kernels.OPTIMAL:
            raise LpNumericalError("simplex kernel failed on a max-slack LP")
        b = _clean_witness(b)
    if stats is not None:
        stats.record(m, time.perf_counter() - t0)
    return d, b


def dominance_margin(w, U: VectorSet | np.ndarray, stats: LpStats | None = None) -> tuple[float, np.ndarray]:
    """``max_b min_u b.(w - u)`` and its maximizer (``inf`` for empty ``U``)."""
    M = U.matrix if isinstance(U, VectorSet) else np.asarray(U, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    G = w - M.reshape(-1, w.shape[0])
    return _max_slack(G, stats)


def lp_dominate(w, U: VectorSet | np.ndarray, tol: float = DEFAULT_TOL, stats: LpStats | None = None) -> np.ndarray | None:
    """A belief where ``w`` beats every member of ``U`` by more than ``tol``,
    or ``None`` if ``w`` is dominated by ``U``."""
    d, b = dominance_margin(w, U, stats)
    return b if d > tol else None


def lp_dominate_region(
    R: RegionConstraintSet | np.ndarray,
    w,
    D: VectorSet | np.ndarray,
    tol: float = DEFAULT_TOL,
    stats: LpStats | None = None,
) -> np.ndarray | None:
    """Like :func:`lp_dominate`, restricted to the interior of region ``R``.

    With ``D`` empty this is a pure interior test of ``R``.
    """
    RM = R.matrix if isinstance(R, RegionConstraintSet) else np.asarray(R, dtype=np.float64)
    DM = D.matrix if isinstance(D, VectorSet) else np.asarray(D, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    G = np.vstack([RM.reshape(-1, w.shape[0]), w - DM.reshape(-1, w.shape[0])])
    d, b = _max_slack(G, stats)
    return b if d > tol else None


def intersect_slack(regions: Sequence[RegionConstraintSet | np.ndarray], stats: LpStats | None = None) -> LpOutcome:
    """Max common slack of all region constraints (``inf`` when there are none)."""
    if not regions:
        raise ValueError("at least one region required")
    mats = [r.matrix if isinstance(r, RegionConstraintSet) else np.asarray(r, dtype=np.float64) for r in regions]
    dims = {m.shape[1] for m in mats}
    if len(dims) != 1:
        raise ValueError("regions of different dimension")
    d, b = _max_slack(np.vstack(mats), stats)
    return LpOutcome("optimal", d, b)


def lp_intersect(regions: Sequence[RegionConstraintSet | np.ndarray], tol: float = DEFAULT_TOL, stats: LpStats | None = None) -> bool:
    """True iff the open regions share an interior point."""
    out = intersect_slack(regions, stats)
    return out.optimal and out.d > tol
