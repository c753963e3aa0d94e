"""Command-line driver: solve game files, fuzz against the oracle, and
benchmark instance families.

Exit codes: 0 success, 1 verification failure, 2 bad input or I/O error.
Setting PTGSOLVE_FAST_FLOAT=1 rounds all input numbers through floating
point (denominators capped at 10^6); output documents are then marked
approximate and carry no exactness guarantee.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

from . import gamedoc
from .gamedoc import DocumentError, GameDocument
from .numerics import is_inf
from .oracle import (
    OracleError,
    brute_force_priced,
    check_equilibrium,
    generate_random,
    value_iteration_sptg,
)
from .priced_game import PricedGame, extended_dijkstra, strategy_iteration
from .ptg import Ptg, PtgValidationError, solve_ptg
from .sptg import Sptg, solve_sptg

FAST_FLOAT_VAR = "PTGSOLVE_FAST_FLOAT"


def _fast_float_enabled() -> bool:
    return os.environ.get(FAST_FLOAT_VAR, "") not in ("", "0")


def _approximate(value):
    if is_inf(value):
        return value
    return Fraction(float(value)).limit_denominator(10**6)


def _approximate_doc(doc: GameDocument) -> GameDocument:
    states = tuple(
        gamedoc.DocState(s.id, s.owner, _approximate(s.rate)) for s in doc.states
    )
    actions = []
    for a in doc.actions:
        interval = a.interval
        if interval is not None:
            lo, hi, lo_c, hi_c = interval
            interval = (_approximate(lo), _approximate(hi), lo_c, hi_c)
        actions.append(
            gamedoc.DocAction(a.id, a.source, a.dest, _approximate(a.cost), interval, a.reset)
        )
    return GameDocument(doc.kind, states, tuple(actions))


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cmd_solve(args) -> int:
    try:
        with open(args.file) as fh:
            doc = gamedoc.parse(fh.read())
    except OSError as exc:
        print(f"input-error: {exc}", file=sys.stderr)
        return 2
    except DocumentError as exc:
        print(f"input-error: {exc}", file=sys.stderr)
        return 2
    approximate = _fast_float_enabled()
    if approximate:
        doc = _approximate_doc(doc)
    try:
        game = doc.to_game()
    except (PtgValidationError, ValueError) as exc:
        print(f"input-error: {exc}", file=sys.stderr)
        return 2

    if doc.kind == "priced":
        values, profile = extended_dijkstra(game)
        out = gamedoc.emit_priced_result(doc, values, approximate)
        plot = None
        verify_ok = True
        if args.verify:
            si_values, _, _ = strategy_iteration(game, profile)
            verify_ok = si_values == values
            try:
                bf = brute_force_priced(game)
                verify_ok = verify_ok and bf == values
            except OracleError:
                pass
    elif doc.kind == "sptg":
        sol = solve_sptg(game)
        out = gamedoc.emit_sptg_result(doc, sol, approximate)
        plot = gamedoc.emit_plot(doc, sol.values)
        verify_ok = True
        if args.verify:
            report = check_equilibrium(game, sol)
            verify_ok = report.passed
            if verify_ok and not approximate:
                vi = value_iteration_sptg(game)
                verify_ok = vi.values == sol.values
    else:
        res = solve_ptg(game)
        out = gamedoc.emit_ptg_result(doc, res, approximate)
        plot = gamedoc.emit_plot(doc, res.values)
        verify_ok = True
        if args.verify:
            for cert in res.trace:
                report = check_equilibrium(cert.sptg, cert.solution)
                verify_ok = verify_ok and report.passed

    _write(args.out, out)
    if args.plot is not None and plot is not None:
        _write(args.plot, plot)
    if not verify_ok:
        print('{"verify": "failed"}', file=sys.stderr)
        return 1
    return 0


def _cmd_fuzz(args) -> int:
    disagreements = 0
    for i in range(args.count):
        seed = args.seed + i
        game = generate_random("sptg", args.size, 3, seed, allow_inf=(i % 4 == 0))
        sol = solve_sptg(game)
        vi = value_iteration_sptg(game)
        ok = vi.values == sol.values and check_equilibrium(game, sol).passed
        if not ok:
            disagreements += 1
            print(f"seed {seed}: disagreement", file=sys.stderr)
    print(f"fuzz: {args.count - disagreements}/{args.count} agree")
    return 0 if disagreements == 0 else 1


def _cmd_bench(args) -> int:
    rows = []
    for i in range(args.count):
        seed = args.seed + i
        if args.family == "reach":
            game = generate_random("ptg", args.size, 3, seed, rate_one_cost_zero=True)
            t0 = time.perf_counter()
            res = solve_ptg(game)
            dt = time.perf_counter() - t0
            rows.append((seed, dt, res.stats.oracle_calls))
        elif args.family == "automata":
            game = generate_random("sptg", args.size, 3, seed, one_player=True)
            t0 = time.perf_counter()
            sol = solve_sptg(game)
            dt = time.perf_counter() - t0
            rows.append((seed, dt, sol.stats.event_points))
        else:
            game = generate_random("sptg", args.size, 4, seed)
            t0 = time.perf_counter()
            sol = solve_sptg(game)
            dt = time.perf_counter() - t0
            rows.append((seed, dt, sol.stats.event_points))
    print("seed\tseconds\tsize")
    for seed, dt, size in rows:
        print(f"{seed}\t{dt:.4f}\t{size}")
    print(f"total\t{sum(dt for _, dt, _ in rows):.4f}\t-")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ptgsolve", description="Exact solver for one-clock priced timed games"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a game document")
    p_solve.add_argument("file")
    p_solve.add_argument("--out", default=None)
    p_solve.add_argument("--plot", default=None)
    p_solve.add_argument("--verify", action="store_true")
    p_solve.set_defaults(func=_cmd_solve)

    p_fuzz = sub.add_parser("fuzz", help="random games checked against the oracle")
    p_fuzz.add_argument("--seed", type=int, default=0)
    p_fuzz.add_argument("--count", type=int, default=20)
    p_fuzz.add_argument("--size", type=int, default=4)
    p_fuzz.set_defaults(func=_cmd_fuzz)

    p_bench = sub.add_parser("bench", help="time an instance family")
    p_bench.add_argument("--family", choices=("reach", "automata", "random"), default="random")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--count", type=int, default=5)
    p_bench.add_argument("--size", type=int, default=20)
    p_bench.set_defaults(func=_cmd_bench)

    args = parser.parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())
