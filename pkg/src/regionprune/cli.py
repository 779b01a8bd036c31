"""``regionprune`` command line: solve, bench and check."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings

from . import __version__
from .algorithms import ALGORITHMS, ORDERINGS, PrunerConfig
from .bench import DEFAULT_TIMEOUT, MISMATCH, NUMERICAL, default_workers, emit_csv, emit_json, run_sweep, summarize
from .dp import DpStats, NonConvergenceError, dp_update, bellman_residual, format_alpha_file, initial_value
from .fileformat import ParseError, load, validate
from .lp import DEFAULT_TOL, LpNumericalError

log = logging.getLogger("regionprune")

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NUMERICAL = 2
EXIT_NONCONVERGENCE = 3


def int_range(text: str) -> list[int]:
    """``5``, ``2..4`` or ``2,4,8`` (items may themselves be ranges)."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo, hi = part.split("..", 1)
                lo_i, hi_i = int(lo), int(hi)
                if hi_i < lo_i:
                    raise ValueError
                out.extend(range(lo_i, hi_i + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None
    return out


def algorithm_list(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    for name in names:
        if name not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {name!r} (choose from {', '.join(ALGORITHMS)})")
    return names


def positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regionprune", description="Exact POMDP value iteration with region-based cross-sum pruning.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeat for debug)")
        sp.add_argument("--tol", type=positive_float, default=DEFAULT_TOL, help="LP slack threshold (default %(default)g)")
        sp.add_argument("--json", metavar="PATH", help="also write machine-readable statistics to PATH")

    s = sub.add_parser("solve", help="run value iteration on a .POMDP file")
    s.add_argument("model", help="path to the .POMDP file")
    s.add_argument("-o", "--output", metavar="PATH", help="alpha-vector file to write (default: MODEL.alpha)")
    s.add_argument("--algorithm", choices=ALGORITHMS, default="rbip", help="cross-sum pruner (default %(default)s)")
    s.add_argument("--ordering", choices=ORDERINGS, default="ascending-size", help="set ordering for gip/ibip/rbip")
    s.add_argument("--iterations", type=int, default=None, metavar="N",
                   help="run exactly N updates instead of iterating to convergence")
    s.add_argument("--max-iterations", type=int, default=500, metavar="N", help="update budget when iterating to convergence")
    s.add_argument("--epsilon", type=positive_float, default=1e-6, help="Bellman residual target (default %(default)g)")
    s.add_argument("--count-all-lps", action="store_true", help="report every LP, not only cross-sum pruning LPs")
    common(s)

    b = sub.add_parser("bench", help="random cross-sum benchmark sweep")
    b.add_argument("--k", type=int_range, default=[2, 3, 4], help="number of sets, e.g. 2..4 (default 2..4)")
    b.add_argument("--n", type=int_range, default=[5], help="vectors per set, e.g. 5 or 5,10 (default 5)")
    b.add_argument("--states", type=int, default=10, help="vector dimension (default %(default)s)")
    b.add_argument("--algorithms", type=algorithm_list, default=list(ALGORITHMS), help="comma-separated (default all)")
    b.add_argument("--seed", type=int, default=0, help="first seed (default %(default)s)")
    b.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds per cell (default %(default)s)")
    b.add_argument("--low", type=float, default=-100.0, help="lower bound of vector entries")
    b.add_argument("--high", type=float, default=100.0, help="upper bound of vector entries")
    b.add_argument("--timeout", type=positive_float, default=DEFAULT_TIMEOUT, help="seconds per algorithm per cell")
    b.add_argument("--workers", type=int, default=None, help="parallel cells (default: number of CPUs)")
    b.add_argument("--csv", metavar="PATH", help="CSV output path (default: stdout)")
    b.add_argument("--omit-timing", action="store_true", help="leave the time column empty so output is reproducible")
    b.add_argument("--keep-going", action="store_true", help="exit 0 even if some cell hit a numerical failure")
    common(b)

    c = sub.add_parser("check", help="parse and validate a .POMDP file")
    c.add_argument("model", help="path to the .POMDP file")
    c.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    return p


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _load(path: str, strict: bool):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return load(path, strict=strict)


def cmd_solve(args) -> int:
    try:
        model = _load(args.model, strict=True)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.iterations is not None and args.iterations < 1:
        print("error: --iterations must be >= 1", file=sys.stderr)
        return EXIT_PARSE
    pruner = PrunerConfig(args.algorithm, args.ordering, args.tol)
    out_path = args.output or args.model + ".alpha"
    fixed = args.iterations is not None
    budget = args.iterations if fixed else args.max_iterations

    V = initial_value(model)
    records = []
    code = EXIT_OK
    print(f"{'iter':>5} {'time_s':>9} {'LP':>9} {'C':>11} {'|V|':>6} {'residual':>11}")
    try:
        for _ in range(budget):
            stats = DpStats()
            t0 = time.perf_counter()
            V_next = dp_update(model, V, pruner, stats)
            elapsed = time.perf_counter() - t0
            residual = bellman_residual(V_next, V)
            counted = stats.total() if args.count_all_lps else stats.cross_sum
            rec = {"iteration": V_next.iteration, "time_s": elapsed, "lp_count": counted.lp_count,
                   "constraints": counted.constraint_total, "size": len(V_next), "residual": residual}
            records.append(rec)
            print(f"{rec['iteration']:>5} {elapsed:>9.4f} {rec['lp_count']:>9} {rec['constraints']:>11} {len(V_next):>6} {residual:>11.4g}")
            V = V_next
            if not fixed and residual <= args.epsilon:
                break
        else:
            if not fixed:
                raise NonConvergenceError(f"no convergence after {budget} iterations (residual {residual:.3g})", residual, V)
    except LpNumericalError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        code = EXIT_NUMERICAL
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_NONCONVERGENCE

    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(format_alpha_file(model, V))
    print(f"wrote {len(V)} vectors to {out_path}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"model": args.model, "algorithm": args.algorithm, "exit_code": code, "iterations": records}, fh, indent=2)
            fh.write("\n")
    return code


def cmd_bench(args) -> int:
    if any(k < 1 for k in args.k) or any(n < 1 for n in args.n) or args.states < 2 or args.seeds < 1:
        print("error: k, n, seeds must be >= 1 and states >= 2", file=sys.stderr)
        return EXIT_PARSE
    workers = args.workers if args.workers is not None else default_workers()
    rows = run_sweep(args.k, args.n, args.states, args.algorithms, range(args.seed, args.seed + args.seeds),
                     timeout=args.timeout, workers=workers, low=args.low, high=args.high, tol=args.tol)
    timing = not args.omit_timing
    if args.csv:
        emit_csv(rows, args.csv, timing=timing)
        print(summarize(rows))
    else:
        emit_csv(rows, sys.stdout, timing=timing)
        print(summarize(rows), file=sys.stderr)
    if args.json:
        emit_json(rows, args.json, timing=timing)
    if any(r.status == MISMATCH for r in rows):
        print("warning: algorithms disagree on result size in some cells", file=sys.stderr)
    if any(r.status == NUMERICAL for r in rows) and not args.keep_going:
        print("error: numerical failure in at least one cell (use --keep-going to ignore)", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        model = _load(args.model, strict=True)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    problems = validate(model)
    for msg in problems:
        print(f"{args.model}: {msg}")
    if problems:
        return EXIT_PARSE
    print(f"{args.model}: ok ({model.n_states} states, {model.n_actions} actions, {model.n_observations} observations)")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    return {"solve": cmd_solve, "bench": cmd_bench, "check": cmd_check}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
