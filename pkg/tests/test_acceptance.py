"""The ten acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line (visible
with ``pytest -s`` or in the ``-v`` summary of failures).
"""

from __future__ import annotations

import os
import time
import warnings

import numpy as np
import pytest

import oracles
from conftest import FIXTURES, SMALL_BETA, SMALL_O, SMALL_R, SMALL_T, random_sets
from regionprune.algorithms import gip_prune, ibip_prune, naive_prune, rbip_prune
from regionprune.bench import make_rng, problem_sets, run_sweep
from regionprune.dp import PomdpModel, dp_update, initial_value
from regionprune.fileformat import ParseError, parse, serialize, validate
from regionprune.geometry import VectorSet, cross_sum, sets_close
from regionprune.lp import DEFAULT_TOL, LpStats, LpTimeout, intersect_slack
from regionprune.prune import pr, pr_region, region

TOL = DEFAULT_TOL
PRUNERS = {"naive": naive_prune, "gip": gip_prune, "ibip": ibip_prune, "rbip": rbip_prune}


def report(number: int, ok: bool, detail: str) -> None:
    print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {detail}")


@pytest.fixture(scope="module")
def suite():
    """Criterion-1 instances, each run through all four algorithms."""
    rng = make_rng(7, 1)
    runs = []
    t0 = time.perf_counter()
    for _ in range(100):
        k, n, S = int(rng.integers(2, 6)), int(rng.integers(3, 9)), int(rng.integers(2, 7))
        sets = random_sets(rng, k, n, S)
        out, stats = {}, {}
        for name, fn in PRUNERS.items():
            stats[name] = LpStats()
            out[name] = fn(sets, TOL, stats[name])
        runs.append({"k": k, "n": n, "S": S, "sets": sets, "out": out, "stats": stats})
    return runs, time.perf_counter() - t0


def test_criterion_1_oracle_equivalence(suite):
    runs, elapsed = suite
    bad = [(r["k"], r["n"], r["S"]) for r in runs if not all(sets_close(r["out"]["naive"], r["out"][a], 1e-6) for a in ("gip", "ibip", "rbip"))]
    ok = not bad and elapsed < 120
    report(1, ok, f"{len(runs) - len(bad)}/{len(runs)} instances set-equal across naive/gip/ibip/rbip in {elapsed:.1f}s")
    assert not bad, bad
    assert elapsed < 120


def test_criterion_2_region_intersection(rng):
    t0 = time.perf_counter()
    agree = checked = skipped = 0
    mismatches = []
    for _ in range(50):
        n, S = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        sets = random_sets(rng, 3, n, S)
        kept = naive_prune(sets, TOL).matrix
        regs = [[region(V, i).matrix for i in range(len(V))] for V in sets]
        for i, j, l in np.ndindex(*(len(V) for V in sets)):
            delta = intersect_slack([regs[0][i], regs[1][j], regs[2][l]]).d
            if abs(delta) < 10 * TOL:
                skipped += 1
                continue
            v = sets[0].matrix[i] + sets[1].matrix[j] + sets[2].matrix[l]
            member = bool(np.any(np.all(np.abs(kept - v) <= 1e-9, axis=1)))
            checked += 1
            if member == (delta > TOL):
                agree += 1
            else:
                mismatches.append((i, j, l, delta))
    elapsed = time.perf_counter() - t0
    ok = agree == checked and elapsed < 60
    report(2, ok, f"{agree}/{checked} tuples agree ({skipped} boundary tuples skipped) in {elapsed:.1f}s")
    assert agree == checked, mismatches[:5]
    assert elapsed < 60


def test_criterion_3_lp_count_parity(suite):
    runs, _ = suite
    off = []
    for r in runs:
        g, i = r["stats"]["gip"].lp_count, r["stats"]["ibip"].lp_count
        if abs(i - g) > 0.1 * g:
            off.append((r["k"], r["n"], r["S"], g, i))
    ok = not off
    report(3, ok, f"{len(runs) - len(off)}/{len(runs)} instances within 10% (outside: {off[:6]}{' ...' if len(off) > 6 else ''})")
    assert not off, f"{len(off)} instances outside the 10% band: {off}"


def test_criterion_4_constraint_ceiling(suite):
    runs, _ = suite
    worst = []
    for r in runs:
        ceiling = sum(len(V) for V in r["sets"])
        worst.append(r["stats"]["ibip"].max_constraints - ceiling)
    violations = sum(w > 0 for w in worst)
    report(4, violations == 0, f"{violations} ibip LPs above the sum of set sizes (max excess {max(worst)})")
    assert violations == 0


def test_criterion_5_rbip_constraint_trend():
    seeds = range(10)
    rows = run_sweep([4, 5], [8, 10], 10, ["ibip", "rbip"], seeds, workers=max(1, os.cpu_count() or 1))
    cells = {}
    for row in rows:
        assert row.status == "ok", row
        cells.setdefault((row.k, row.n), {}).setdefault(row.seed, {})[row.algorithm] = row.constraints
    shares = {}
    for cell, by_seed in sorted(cells.items()):
        wins = sum(v["rbip"] <= v["ibip"] for v in by_seed.values())
        shares[cell] = wins / len(by_seed)
    ok = all(s >= 0.7 for s in shares.values())
    report(5, ok, "rbip C <= ibip C share per (k, n): " + ", ".join(f"{c}={s:.0%}" for c, s in shares.items()))
    assert ok, shares


def test_criterion_6_interleaving(rng):
    bad = 0
    for _ in range(50):
        S = int(rng.integers(2, 6))
        U, V, W = random_sets(rng, 3, int(rng.integers(2, 6)), S)
        left = pr(cross_sum(U, pr(cross_sum(V, W))))
        right = pr(cross_sum(cross_sum(U, V), W))
        bad += not sets_close(left, right, 1e-6)
    report(6, bad == 0, f"{50 - bad}/50 triples satisfy pr(U+pr(V+W)) = pr(U+V+W)")
    assert bad == 0


def test_criterion_7_dp_expectimax():
    t0 = time.perf_counter()
    model = PomdpModel(SMALL_T, SMALL_O, SMALL_R, SMALL_BETA)
    V0 = initial_value(model)
    V = V0
    for _ in range(3):
        V = dp_update(model, V)
    beliefs = make_rng(99).dirichlet([1.0, 1.0], size=100)
    leaf = V0.vectors.matrix[0]
    err = max(abs(V.value(b) - oracles.expectimax(SMALL_T, SMALL_O, SMALL_R, SMALL_BETA, b, 3, leaf)) for b in beliefs)
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-6 and elapsed < 5
    report(7, ok, f"max |V3(b) - expectimax(b)| = {err:.2e} over 100 beliefs, |V3| = {len(V)}, {elapsed:.2f}s")
    assert err <= 1e-6
    assert elapsed < 5


def test_criterion_8_region_identity(rng):
    bad = 0
    for _ in range(50):
        S = int(rng.integers(2, 6))
        U, W = random_sets(rng, 2, int(rng.integers(2, 7)), S)
        parts = []
        for i in range(len(U)):
            kept = pr_region(region(U, i), W)
            parts.append(kept.matrix + U.matrix[i])
        lhs = VectorSet(np.vstack(parts))
        bad += not sets_close(lhs, pr(cross_sum(U, W)), 1e-6)
    report(8, bad == 0, f"{50 - bad}/50 pairs satisfy the region-based identity")
    assert bad == 0


VALID = ["tiger", "arities_compact", "arities_expanded", "minimal", "cost", "wildcards", "collapse", "start_include"]
MALFORMED = {
    "bad_rowsum": (5, "sums to 0.9"),
    "bad_keyword": (7, "unknown keyword"),
    "bad_identifier": (7, "unknown state"),
    "bad_missing": (None, "missing mandatory actions"),
    "bad_count": (5, "expected 3 values"),
    "bad_discount": (1, "discount"),
}


def _read(name):
    return (FIXTURES / f"{name}.POMDP").read_text()


def _same(m1, m2):
    return (
        np.allclose(m1.transition, m2.transition, atol=1e-12, rtol=0)
        and np.allclose(m1.observation, m2.observation, atol=1e-12, rtol=0)
        and np.allclose(m1.reward, m2.reward, atol=1e-12, rtol=0)
        and m1.discount == m2.discount
    )


def test_criterion_9_parser_fixtures():
    problems = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        models = {}
        for name in VALID:
            m = parse(_read(name))
            models[name] = m
            if validate(m):
                problems.append(f"{name}: diagnostics {validate(m)}")
            again = parse(serialize(m))
            if not (_same(m, again) and serialize(again) == serialize(m)):
                problems.append(f"{name}: parse/serialize/parse is not a fixed point")
        if not _same(models["arities_compact"], models["arities_expanded"]):
            problems.append("compact and expanded arities disagree")
        if not np.all(models["cost"].reward == -2.0):
            problems.append("values: cost did not negate rewards")
        if not (np.array_equal(models["minimal"].transition[0], np.eye(2)) and np.all(models["minimal"].reward == 1.0)):
            problems.append("minimal fixture misread")
        w = models["wildcards"]
        if not (w.transition[0, 0, 1] == 1.0 and w.transition[0, 0, 0] == 0.0 and w.reward[0, 0] == 3.0 and w.observation[1, 0, 0] == 0.8):
            problems.append("specific statements did not override later wildcards")
        for name, (line, text) in MALFORMED.items():
            try:
                parse(_read(name))
            except ParseError as exc:
                if exc.line != line or text not in str(exc):
                    problems.append(f"{name}: got {exc} (line {exc.line})")
            else:
                problems.append(f"{name}: accepted")
        diag = validate(parse(_read("bad_rowsum"), strict=False))
        if len(diag) != 1:
            problems.append(f"bad_rowsum diagnostics: {diag}")
    report(9, not problems, f"{len(VALID)} valid and {len(MALFORMED)} malformed fixtures" + (f"; problems: {problems}" if problems else ""))
    assert not problems, problems


def test_criterion_10_performance_trend():
    sets = problem_sets(5, 10, 10, 0)
    t0 = time.perf_counter()
    rbip_prune(sets, TOL, LpStats())
    t_rbip = time.perf_counter() - t0
    # naive only has to lose; give it a budget well above rbip's time
    budget = max(60.0, 20 * t_rbip)
    t0 = time.perf_counter()
    try:
        naive_prune(sets, TOL, LpStats(deadline=time.monotonic() + budget))
        naive_note = ""
    except LpTimeout:
        naive_note = " (timed out)"
    t_naive = time.perf_counter() - t0

    big = problem_sets(6, 10, 10, 0)
    times = {}
    for name, fn in (("ibip", ibip_prune), ("rbip", rbip_prune)):
        t0 = time.perf_counter()
        fn(big, TOL, LpStats(deadline=time.monotonic() + 600))
        times[name] = time.perf_counter() - t0
    ok = t_rbip < t_naive and all(t < 600 for t in times.values())
    report(10, ok, f"k=5: rbip {t_rbip:.2f}s vs naive {t_naive:.2f}s{naive_note}; k=6: ibip {times['ibip']:.2f}s, rbip {times['rbip']:.2f}s")
    assert ok
