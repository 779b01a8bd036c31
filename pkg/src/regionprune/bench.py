"""Artificial cross-sum benchmarks over (k, n) grids.

A problem (k, n) is k random minimal sets of n vectors each; every requested
algorithm prunes the same sets and reports time, LP count and constraint
total. Randomness comes from numpy's PCG64 seeded with ``[seed, k, n]``, so
each cell is reproducible on its own.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

import numpy as np

from .algorithms import ALGORITHMS, PRUNERS, naive_prune
from .geometry import VectorSet
from .lp import DEFAULT_TOL, LpNumericalError, LpStats, LpTimeout, lp_dominate
from .prune import pr_indices

log = logging.getLogger(__name__)

CSV_HEADER = ("problem", "k", "n", "states", "algorithm", "seed", "time_s", "lp_count", "constraints", "result_size", "status")
DEFAULT_TIMEOUT = 600.0

OK = "ok"
TIMEOUT = "timeout"
NUMERICAL = "numerical-error"
MISMATCH = "size-mismatch"


class GenerationError(RuntimeError):
    pass


def make_rng(seed, *extra: int) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64([int(seed), *map(int, extra)]))


def gen_random_vector_set(
    n_states: int,
    n: int,
    rng_seed=0,
    low: float = -100.0,
    high: float = 100.0,
    max_rejects: int | None = None,
    tol: float = DEFAULT_TOL,
) -> VectorSet:
    """A minimal set of ``n`` vectors with entries uniform on ``[low, high]``.

    A candidate is admitted only if the current set does not dominate it;
    members it makes dominated are then dropped, so the set stays minimal.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n_states < 2:
        raise ValueError("n_states must be >= 2")
    rng = make_rng(rng_seed)
    cap = max_rejects if max_rejects is not None else 1000 * n
    M = np.empty((0, n_states))
    rejects = 0
    while M.shape[0] < n:
        v = low + (high - low) * rng.random(n_states)
        if M.shape[0] and lp_dominate(v, M, tol) is None:
            rejects += 1
            if rejects > cap:
                raise GenerationError(f"gave up after {rejects} rejected candidates ({M.shape[0]} of {n} vectors)")
            continue
        M = np.vstack([M, v])
        if M.shape[0] >= 2:
            M = VectorSet(M).matrix[pr_indices(VectorSet(M).matrix, tol)]
    return VectorSet(M)


def problem_sets(k: int, n: int, n_states: int, seed: int, low: float = -100.0, high: float = 100.0) -> list[VectorSet]:
    """The k sets of cell (k, n, seed), drawn from one stream."""
    rng = make_rng(seed, k, n)
    return [gen_random_vector_set(n_states, n, rng, low, high) for _ in range(k)]


@dataclass
class BenchRow:
    problem: str
    k: int
    n: int
    states: int
    algorithm: str
    seed: int
    time_s: float | None
    lp_count: int
    constraints: int
    result_size: int
    status: str = OK
    histogram: dict = field(default_factory=dict, compare=False, repr=False)

    def sort_key(self):
        return (self.k, self.n, self.seed, self.algorithm)


def _cell(args) -> list[BenchRow]:
    k, n, n_states, seed, algorithms, timeout, low, high, tol = args
    sets = problem_sets(k, n, n_states, seed, low, high)
    problem = f"k{k}-n{n}-s{n_states}-seed{seed}"
    rows = []
    for name in algorithms:
        stats = LpStats(deadline=time.monotonic() + timeout if timeout else None)
        t0 = time.perf_counter()
        status, size = OK, 0
        try:
            if name == "naive":
                out = naive_prune(sets, tol, stats)
            else:
                out = PRUNERS[name](sets, tol, stats)
            size = len(out)
        except LpTimeout:
            status = TIMEOUT
        except LpNumericalError as exc:
            log.warning("%s %s: %s", problem, name, exc)
            status = NUMERICAL
        elapsed = time.perf_counter() - t0
        rows.append(
            BenchRow(problem, k, n, n_states, name, seed, elapsed, stats.lp_count, stats.constraint_total, size, status,
                     {int(c): int(m) for c, m in sorted(stats.histogram.items())})
        )
    sizes = {r.result_size for r in rows if r.status == OK}
    if len(sizes) > 1:
        log.warning("%s: result sizes disagree %s", problem, sorted(sizes))
        for r in rows:
            if r.status == OK:
                r.status = MISMATCH
    return rows


def run_sweep(
    k_range: Iterable[int],
    n_range: Iterable[int],
    n_states: int = 10,
    algorithms: Sequence[str] = ALGORITHMS,
    seeds: Iterable[int] = (0,),
    timeout: float | None = DEFAULT_TIMEOUT,
    workers: int = 1,
    low: float = -100.0,
    high: float = 100.0,
    tol: float = DEFAULT_TOL,
) -> list[BenchRow]:
    """Run every algorithm on every (k, n, seed) cell; rows sorted by
    (k, n, seed, algorithm). Timeouts and numerical failures become rows."""
    algorithms = list(algorithms)
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    if not algorithms:
        return []
    ks, ns, seeds = list(k_range), list(n_range), list(seeds)
    if not ks or not ns or not seeds:
        raise ValueError("k, n and seed ranges must be non-empty")
    jobs = [(k, n, n_states, s, algorithms, timeout, low, high, tol) for k in ks for n in ns for s in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_cell, jobs))
    else:
        parts = [_cell(j) for j in jobs]
    rows = [r for part in parts for r in part]
    rows.sort(key=BenchRow.sort_key)
    return rows


def _csv_text(rows: Iterable[BenchRow], timing: bool) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(rows, key=BenchRow.sort_key):
        t = "" if not timing or r.time_s is None else f"{r.time_s:.6f}"
        w.writerow([r.problem, r.k, r.n, r.states, r.algorithm, r.seed, t, r.lp_count, r.constraints, r.result_size, r.status])
    return buf.getvalue()


def emit_csv(rows: Iterable[BenchRow], destination, timing: bool = True) -> None:
    """Write rows as CSV to a path or a text stream.

    With ``timing=False`` the time column is left empty, which makes the file
    a pure function of the sweep parameters.
    """
    text = _csv_text(rows, timing)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def read_csv(source) -> list[BenchRow]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for rec in reader:
        out.append(
            BenchRow(
                rec["problem"], int(rec["k"]), int(rec["n"]), int(rec["states"]), rec["algorithm"], int(rec["seed"]),
                float(rec["time_s"]) if rec["time_s"] else None,
                int(rec["lp_count"]), int(rec["constraints"]), int(rec["result_size"]), rec["status"],
            )
        )
    return out


def emit_json(rows: Iterable[BenchRow], destination, timing: bool = True) -> None:
    """Per-cell detail including each run's LP-size histogram."""
    recs = []
    for r in sorted(rows, key=BenchRow.sort_key):
        d = asdict(r)
        d["histogram"] = {str(c): m for c, m in r.histogram.items()}
        if not timing:
            d["time_s"] = None
        recs.append(d)
    text = json.dumps(recs, indent=2, sort_keys=True) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)


def summarize(rows: Sequence[BenchRow]) -> str:
    """Fixed-width table; ``speedup`` is the slowest time in the cell divided
    by this row's time."""
    cells: dict[str, list[BenchRow]] = {}
    for r in rows:
        cells.setdefault(r.problem, []).append(r)
    lines = [f"{'problem':<28} {'alg':<6} {'time_s':>10} {'LP':>9} {'C':>11} {'|V|':>6} {'speedup':>8}  status"]
    for problem, group in cells.items():
        times = [r.time_s for r in group if r.time_s is not None]
        slowest = max(times) if times else None
        for r in group:
            t = "-" if r.time_s is None else f"{r.time_s:.4f}"
            sp = "-" if r.time_s is None or not slowest or r.time_s <= 0 else f"{slowest / r.time_s:.2f}"
            lines.append(f"{problem:<28} {r.algorithm:<6} {t:>10} {r.lp_count:>9} {r.constraints:>11} {r.result_size:>6} {sp:>8}  {r.status}")
    return "\n".join(lines)


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


__all__ = [
    "BenchRow",
    "CSV_HEADER",
    "GenerationError",
    "emit_csv",
    "emit_json",
    "gen_random_vector_set",
    "make_rng",
    "problem_sets",
    "read_csv",
    "run_sweep",
    "summarize",
]
