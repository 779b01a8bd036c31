"""Exact dynamic programming over beliefs with a pluggable cross-sum pruner.

Arrays follow one layout throughout::

    transition[a, s, s2]   = P^a(s2 | s)
    observation[a, s2, z]  = O^a(z | s2)
    reward[a, s]           = R^a(s)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algorithms import PrunerConfig, prune_cross_sum
from .geometry import Belief, VectorSet
from .lp import DEFAULT_TOL, LpStats, dominance_margin
from .prune import pr

log = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-9


class NonConvergenceError(RuntimeError):
    """Value iteration hit its iteration budget; carries the last value function."""

    def __init__(self, message: str, residual: float, value: "ValueFunction"):
        super().__init__(message)
        self.residual = residual
        self.value = value


@dataclass(frozen=True, eq=False)
class PomdpModel:
    transition: np.ndarray
    observation: np.ndarray
    reward: np.ndarray
    discount: float
    state_names: tuple[str, ...] | None = None
    action_names: tuple[str, ...] | None = None
    observation_names: tuple[str, ...] | None = None
    start: np.ndarray | None = None

    def __post_init__(self):
        T = np.array(self.transition, dtype=np.float64)
        O = np.array(self.observation, dtype=np.float64)
        R = np.array(self.reward, dtype=np.float64)
        if T.ndim != 3 or T.shape[1] != T.shape[2]:
            raise ValueError(f"transition must be (A, S, S), got {T.shape}")
        A, S, _ = T.shape
        if O.ndim != 3 or O.shape[:2] != (A, S):
            raise ValueError(f"observation must be (A, S, Z) = ({A}, {S}, Z), got {O.shape}")
        if R.shape != (A, S):
            raise ValueError(f"reward must be (A, S) = ({A}, {S}), got {R.shape}")
        if A == 0 or S == 0 or O.shape[2] == 0:
            raise ValueError("model needs at least one state, action and observation")
        for name, arr in (("transition", T), ("observation", O), ("reward", R)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} entries must be finite")
            arr.setflags(write=False)
        object.__setattr__(self, "transition", T)
        object.__setattr__(self, "observation", O)
        object.__setattr__(self, "reward", R)
        object.__setattr__(self, "discount", float(self.discount))
        for attr, size in (("state_names", S), ("action_names", A), ("observation_names", O.shape[2])):
            names = getattr(self, attr)
            if names is not None:
                names = tuple(str(x) for x in names)
                if len(names) != size:
                    raise ValueError(f"{attr} needs {size} entries")
                object.__setattr__(self, attr, names)
        if self.start is not None:
            b = np.array(self.start, dtype=np.float64)
            if b.shape != (S,):
                raise ValueError("start distribution has the wrong length")
            b.setflags(write=False)
            object.__setattr__(self, "start", b)

    @property
    def n_states(self) -> int:
        return self.transition.shape[1]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[0]

    @property
    def n_observations(self) -> int:
        return self.observation.shape[2]

    def action_label(self, a: int) -> str:
        return self.action_names[a] if self.action_names else str(a)


def model_diagnostics(model: PomdpModel, tol: float = STOCHASTIC_TOL) -> list[str]:
    """Row-stochasticity and discount problems, one message each."""
    out = []
    if not 0.0 <= model.discount < 1.0:
        out.append(f"discount {model.discount!r} outside [0, 1)")
    T_sums = model.transition.sum(axis=2)
    for a, s in zip(*np.nonzero(np.abs(T_sums - 1.0) > tol)):
        out.append(
            f"transition row for action {model.action_label(a)} state {_name(model.state_names, s)} sums to {T_sums[a, s]:.10g}"
        )
    O_sums = model.observation.sum(axis=2)
    for a, s in zip(*np.nonzero(np.abs(O_sums - 1.0) > tol)):
        out.append(
            f"observation row for action {model.action_label(a)} state {_name(model.state_names, s)} sums to {O_sums[a, s]:.10g}"
        )
    if np.any(model.transition < -tol):
        out.append("negative transition probability")
    if np.any(model.observation < -tol):
        out.append("negative observation probability")
    if model.start is not None and (abs(model.start.sum() - 1.0) > tol or np.any(model.start < -tol)):
        out.append("start distribution is not a probability vector")
    return out


def _name(names, i) -> str:
    return names[i] if names else str(int(i))


@dataclass(frozen=True)
class ValueFunction:
    vectors: VectorSet
    iteration: int = 0

    def __post_init__(self):
        if len(self.vectors) == 0:
            raise ValueError("value function needs at least one vector")

    def value(self, b) -> float:
        return self.vectors.value(b)

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class DpStats:
    """LP counters of one update, split the way the experiments report them."""

    cross_sum: LpStats = field(default_factory=LpStats)
    other: LpStats = field(default_factory=LpStats)

    def total(self) -> LpStats:
        t = LpStats()
        t.merge(self.cross_sum)
        t.merge(self.other)
        return t


def _check_index(i: int, size: int, what: str) -> None:
    if not 0 <= i < size:
        raise IndexError(f"{what} index {i} out of range [0, {size})")


def _predicted(model: PomdpModel, a: int, b) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (model.n_states,):
        raise ValueError("belief dimension does not match the model")
    return b @ model.transition[a]


def obs_prob(model: PomdpModel, a: int, z: int, b) -> float:
    """P^a(z | b)."""
    _check_index(a, model.n_actions, "action")
    _check_index(z, model.n_observations, "observation")
    return float(_predicted(model, a, b) @ model.observation[a, :, z])


def belief_update(model: PomdpModel, a: int, z: int, b) -> Belief:
    """Bayes update T(b | a, z)."""
    _check_index(a, model.n_actions, "action")
    _check_index(z, model.n_observations, "observation")
    joint = _predicted(model, a, b) * model.observation[a, :, z]
    p = joint.sum()
    if not p > 0.0:
        raise ZeroDivisionError(f"observation {z} has probability zero after action {a} at this belief")
    return Belief(joint / p)


def _projection(model: PomdpModel, a: int, z: int) -> np.ndarray:
    # M[s, s2] = beta * P(s2|s) * O(z|s2)
    return model.discount * model.transition[a] * model.observation[a, :, z][None, :]


def back_project(model: PomdpModel, v, a: int, z: int) -> np.ndarray:
    """v^{a,z}(s) = R^a(s)/|Z| + beta * sum_s2 O^a(z|s2) P^a(s2|s) v(s2)."""
    _check_index(a, model.n_actions, "action")
    _check_index(z, model.n_observations, "observation")
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (model.n_states,):
        raise ValueError("vector dimension does not match the model")
    return model.reward[a] / model.n_observations + _projection(model, a, z) @ v


def compute_vaz(
    model: PomdpModel, V: ValueFunction | VectorSet, a: int, z: int, tol: float = DEFAULT_TOL, stats: LpStats | None = None
) -> VectorSet:
    _check_index(a, model.n_actions, "action")
    _check_index(z, model.n_observations, "observation")
    M = V.vectors.matrix if isinstance(V, ValueFunction) else V.matrix
    proj = model.reward[a] / model.n_observations + M @ _projection(model, a, z).T
    return pr(VectorSet(proj), tol, stats)


def compute_va(
    model: PomdpModel,
    V: ValueFunction | VectorSet,
    a: int,
    pruner: PrunerConfig = PrunerConfig(),
    stats: DpStats | None = None,
) -> VectorSet:
    """PR of the cross-sum over observations of the V^{a,z}.

    Singleton V^{a,z} become a constant translate and never reach the pruner.
    """
    stats = stats if stats is not None else DpStats()
    parts = [compute_vaz(model, V, a, z, pruner.tol, stats.other) for z in range(model.n_observations)]
    offset = np.zeros(model.n_states)
    rest = []
    for P in parts:
        if len(P) == 1:
            offset += P.matrix[0]
        else:
            rest.append(P)
    if not rest:
        return VectorSet(offset[None, :])
    if len(rest) == 1:
        # already minimal; a translate stays minimal
        return VectorSet(rest[0].matrix + offset)
    out = prune_cross_sum(rest, pruner, stats.cross_sum)
    return VectorSet(out.matrix + offset)


def dp_update(
    model: PomdpModel,
    V: ValueFunction,
    pruner: PrunerConfig = PrunerConfig(),
    stats: DpStats | None = None,
) -> ValueFunction:
    """One exact Bellman backup: PR of the union over actions of V^a.

    Output vectors are tagged with their action index (the smallest one when
    several actions produce the same vector).
    """
    stats = stats if stats is not None else DpStats()
    mats, tags = [], []
    for a in range(model.n_actions):
        Va = compute_va(model, V, a, pruner, stats)
        mats.append(Va.matrix)
        tags.extend([a] * len(Va))
    union = VectorSet(np.vstack(mats), tags)
    return ValueFunction(pr(union, pruner.tol, stats.other), V.iteration + 1)


def initial_value(model: PomdpModel) -> ValueFunction:
    """The constant lower bound min R / (1 - beta), tagged with action 0."""
    if model.discount >= 1.0:
        raise ValueError("discount must be < 1")
    c = model.reward.min() / (1.0 - model.discount)
    return ValueFunction(VectorSet(np.full((1, model.n_states), c), [0]), 0)


def bellman_residual(V_new: ValueFunction | VectorSet, V_old: ValueFunction | VectorSet) -> float:
    """max over beliefs of |V_new(b) - V_old(b)|, computed exactly.

    The largest gain of one envelope over the other is attained where a
    single vector of the first beats the whole second set by most, which is
    exactly a dominance LP per vector.
    """
    A = V_new.vectors if isinstance(V_new, ValueFunction) else V_new
    B = V_old.vectors if isinstance(V_old, ValueFunction) else V_old
    worst = 0.0
    for X, Y in ((A, B), (B, A)):
        for row in X.matrix:
            d, _ = dominance_margin(row, Y.matrix, None)
            worst = max(worst, d)
    return worst


def value_iterate(
    model: PomdpModel,
    pruner: PrunerConfig = PrunerConfig(),
    max_iter: int = 100,
    epsilon: float = 1e-6,
    V0: ValueFunction | None = None,
    history: list | None = None,
    require_convergence: bool = True,
) -> ValueFunction:
    """Repeat :func:`dp_update` until the residual drops to ``epsilon``.

    ``history`` (if given) receives one ``(ValueFunction, DpStats, residual)``
    per iteration. Raises :class:`NonConvergenceError` when ``max_iter`` is
    exhausted, unless ``require_convergence`` is false.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    V = V0 if V0 is not None else initial_value(model)
    residual = float("inf")
    for _ in range(max_iter):
        stats = DpStats()
        V_next = dp_update(model, V, pruner, stats)
        residual = bellman_residual(V_next, V)
        log.info("iteration %d: |V|=%d residual=%.3g lps=%d", V_next.iteration, len(V_next), residual, stats.cross_sum.lp_count)
        if history is not None:
            history.append((V_next, stats, residual))
        V = V_next
        if residual <= epsilon:
            return V
    if require_convergence:
        raise NonConvergenceError(f"no convergence after {max_iter} iterations (residual {residual:.3g})", residual, V)
    return V


def bellman_rhs(model: PomdpModel, V: ValueFunction | VectorSet, b) -> float:
    """max_a [ b.R^a + beta * sum_z P^a(z|b) V(T(b|a,z)) ], evaluated directly."""
    vs = V.vectors if isinstance(V, ValueFunction) else V
    b = np.asarray(b, dtype=np.float64)
    best = -np.inf
    for a in range(model.n_actions):
        q = float(b @ model.reward[a])
        for z in range(model.n_observations):
            p = obs_prob(model, a, z, b)
            if p > 0.0:
                q += model.discount * p * vs.value(belief_update(model, a, z, b).probs)
        best = max(best, q)
    return best


def format_alpha_file(model: PomdpModel, V: ValueFunction) -> str:
    """Alpha-vector file: action line, coefficient line, blank line per vector."""
    tags = V.vectors.tags or (0,) * len(V)
    chunks = []
    for row, a in zip(V.vectors.matrix, tags):
        chunks.append(f"{int(a)}\n" + " ".join(f"{x:.17g}" for x in row) + "\n\n")
    return "".join(chunks)


def parse_alpha_file(text: str) -> VectorSet:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) % 2:
        raise ValueError("alpha file needs action/coefficient line pairs")
    tags = [int(lines[i]) for i in range(0, len(lines), 2)]
    rows = [[float(t) for t in lines[i].split()] for i in range(1, len(lines), 2)]
    return VectorSet(np.array(rows), tags)


__all__: Sequence[str] = [
    "DpStats",
    "NonConvergenceError",
    "PomdpModel",
    "ValueFunction",
    "back_project",
    "belief_update",
    "bellman_residual",
    "bellman_rhs",
    "compute_va",
    "compute_vaz",
    "dp_update",
    "format_alpha_file",
    "initial_value",
    "model_diagnostics",
    "obs_prob",
    "parse_alpha_file",
    "value_iterate",
]
