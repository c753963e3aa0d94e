"""End-to-end acceptance gate.

Each test exercises one release criterion and prints a single PASS/FAIL
line to the terminal, bypassing output capture, so a plain pytest run
shows the verdict per criterion.  Shared heavy suites (the exhaustive
two-state grids and the random batches) are computed once per session.
"""

import itertools
import time
from fractions import Fraction as Fr

import pytest

from ptgsolve.fixtures import delayed_exit_jump, fixture_a, maximizer_reset_loop
from ptgsolve.numerics import F0, F1, INF, PwlFn, is_inf
from ptgsolve.oracle import (
    brute_force_priced,
    check_equilibrium,
    generate_random,
    value_iteration_sptg,
)
from ptgsolve.priced_game import (
    PAction,
    PotentialMatrix,
    PricedGame,
    extended_dijkstra,
    potential_less,
    strategy_iteration,
)
from ptgsolve.ptg import solve_ptg
from ptgsolve.sptg import Sptg, solve_sptg


@pytest.fixture
def announce(capfd):
    def run(num, desc, fn):
        try:
            fn()
        except BaseException:
            with capfd.disabled():
                print(f"[criterion {num}] FAIL - {desc}")
            raise
        with capfd.disabled():
            print(f"[criterion {num}] PASS - {desc}")

    return run


# -- shared suites -----------------------------------------------------------


def _action_sets(state, dests, costs):
    """All 1- and 2-action sets for one state: every singleton plus every
    distinct-destination pair, over the given cost alphabet."""
    singles = [((state, d, c),) for d in dests for c in costs]
    pairs = [
        ((state, d1, c1), (state, d2, c2))
        for d1, d2 in itertools.combinations(dests, 2)
        for c1 in costs
        for c2 in costs
    ]
    return singles + pairs


def _exhaustive_games(n, costs, rates=None):
    """Every game with n states, each holding one of the generated action
    sets, over all owner (and rate) assignments."""
    dests = (None,) + tuple(range(n))
    per_state = [_action_sets(k, dests, costs) for k in range(n)]
    owner_space = itertools.product((1, 2), repeat=n)
    for owners in owner_space:
        rate_space = itertools.product(rates, repeat=n) if rates else [None]
        for rr in rate_space:
            for sets in itertools.product(*per_state):
                actions = tuple(PAction(*a) for st in sets for a in st)
                yield owners, rr, actions


@pytest.fixture(scope="session")
def sptg_grid():
    """Exhaustive one- and two-state clock games over small alphabets,
    solved and cross-checked against value iteration and play probes."""
    costs = (F0, F1, Fr(2))
    rates = (F0, F1, Fr(2))
    rows = []
    for n in (1, 2):
        for owners, rr, actions in _exhaustive_games(n, costs, rates):
            g = Sptg(owners, rr, actions)
            sol = solve_sptg(g)
            vi_ok = value_iteration_sptg(g).values == sol.values
            eq_ok = check_equilibrium(g, sol, samples=2).passed
            rows.append((g, sol, vi_ok, eq_ok))
    return rows


@pytest.fixture(scope="session")
def sptg_randoms():
    rows = []
    for seed in range(200):
        n = 2 + seed % 3
        g = generate_random("sptg", n, 3, seed, allow_inf=(seed % 4 == 0))
        sol = solve_sptg(g)
        vi_ok = value_iteration_sptg(g).values == sol.values
        eq_ok = check_equilibrium(g, sol, samples=50).passed
        rows.append((g, sol, vi_ok, eq_ok))
    return rows


@pytest.fixture(scope="session")
def uniform_ptgs():
    rows = []
    for seed in range(50):
        g = generate_random("ptg", 3, 3, seed, rate_one_cost_zero=True)
        rows.append((g, solve_ptg(g)))
    return rows


# -- criteria ----------------------------------------------------------------


def test_criterion_1_three_state_golden_instance(announce):
    def body():
        fx = fixture_a()
        sol = solve_sptg(fx.game)
        assert sol.values == fx.expected["values"]
        assert sol.values[0].interior_breaks() == (fx.expected["event_point_at"],)
        assert sol.stats.event_points == fx.expected["event_points"]
        # the expensive route equals its action cost plus the target value
        via = fx.expected["k2b_via_a2"]
        for num in range(9):
            x = Fr(num, 8)
            assert via.eval(x) == Fr(1, 2) + sol.values[2].eval(x)

    announce(1, "three-state golden instance solved exactly, switch at 1/2", body)


def test_criterion_2_value_jump_at_zero(announce):
    def body():
        fx = delayed_exit_jump()
        res = solve_ptg(fx.game)
        assert res.values == fx.expected["values"]
        for k, pts in fx.expected["jump_points"].items():
            assert res.jump_points(k) == pts
        assert res.values[1].eval(F0) == F1
        assert res.values[1].eval(F0, side="right") == F0

    announce(2, "jump discontinuity at time 0 reproduced exactly", body)


def test_criterion_3_sweep_matches_value_iteration(announce, sptg_grid, sptg_randoms):
    def body():
        assert len(sptg_grid) >= 46656
        assert len(sptg_randoms) >= 200
        bad = [i for i, (_, _, vi_ok, _) in enumerate(sptg_grid) if not vi_ok]
        bad += [i for i, (_, _, vi_ok, _) in enumerate(sptg_randoms) if not vi_ok]
        assert bad == []

    announce(
        3,
        "sweep equals value iteration on the exhaustive grid and 200 randoms",
        body,
    )


def test_criterion_4_untimed_solvers_agree(announce):
    def body():
        costs = (F0, F1, Fr(2), Fr(3), Fr(4), INF)
        count = 0
        for n in (1, 2):
            for owners, _, actions in _exhaustive_games(n, costs):
                g = PricedGame(owners, actions)
                dv, profile = extended_dijkstra(g)
                sv, _, _ = strategy_iteration(
                    g, tuple(js[0] for js in g.state_actions)
                )
                bf = brute_force_priced(g)
                assert dv == sv == bf, (owners, actions)
                count += 1
        assert count >= 63504
        for seed in range(200):
            g = generate_random("priced", 3, 3, seed, allow_inf=(seed % 2 == 0))
            dv, _ = extended_dijkstra(g)
            sv, _, _ = strategy_iteration(g, tuple(js[0] for js in g.state_actions))
            assert dv == sv == brute_force_priced(g), seed

    announce(
        4,
        "shortest-path, strategy iteration and brute force agree on every "
        "exhaustive and random untimed game",
        body,
    )


def test_criterion_5_potential_strictly_decreases(announce):
    def body():
        # recorded switch sequence of a worked five-state instance over a
        # four-rate ladder: each step's matrix is strictly below the last
        ladder = (F0, F1, Fr(2), Fr(3))
        chain = [
            PotentialMatrix(
                ((0, 0, 0, 0), (-1, 0, 0, 0), (-1, 0, 0, 0), (1, 0, 0, 0), (0, 0, 0, 0)),
                ladder,
            ),
            PotentialMatrix(
                ((-1, 0, -1, 1), (0, 0, -1, 0), (0, 0, 1, 0), (0, 0, 0, 0), (0, 0, 0, 0)),
                ladder,
            ),
            PotentialMatrix(
                ((-1, 1, 0, 1), (-1, -1, 0, 0), (0, 0, 0, 0), (0, 0, 0, 0), (0, 0, 0, 0)),
                ladder,
            ),
            PotentialMatrix(
                ((-1, 0, -1, 1), (-1, 0, 0, 1), (0, 0, 0, 0), (0, 0, 0, 0), (0, 0, 0, 0)),
                ladder,
            ),
        ]
        for earlier, later in zip(chain, chain[1:]):
            assert potential_less(later, earlier)
            assert not potential_less(earlier, later)
        # and the invariant holds live on instrumented random sweeps
        checks = 0
        for seed in range(60):
            g = generate_random("sptg", 3, 3, seed)
            sol = solve_sptg(g, instrument=True)
            assert sol.stats.potential_violations == 0, seed
            checks += sol.stats.potential_checks
        assert checks > 0

    announce(
        5,
        "potential matrix strictly decreases on the recorded chain and on "
        "every instrumented switch",
        body,
    )


def test_criterion_6_event_point_bounds(announce, sptg_grid, sptg_randoms):
    def body():
        for g, sol, _, _ in sptg_grid:
            assert sol.stats.event_points <= g.event_bound()
        for g, sol, _, _ in sptg_randoms:
            assert sol.stats.event_points <= g.event_bound()
        for seed in range(50):
            n = 2 + seed % 3
            g = generate_random("sptg", n, 3, seed, one_player=True)
            sol = solve_sptg(g)
            assert sol.stats.event_points <= n * (n + 1), seed

    announce(
        6,
        "event points within min(12^n, profile) bound, n(n+1) for one player",
        body,
    )


def test_criterion_7_uniform_rate_single_step(announce, uniform_ptgs):
    def body():
        assert len(uniform_ptgs) >= 50
        for g, res in uniform_ptgs:
            for cert in res.trace:
                assert cert.solution.stats.sweep_steps == 1, g
            d = len(g.ladder) - 1
            assert res.stats.oracle_calls <= (g.reset_depth + 1) * d

    announce(
        7,
        "rate-1 cost-0 games need one sweep step per interval",
        body,
    )


def test_criterion_8_equilibrium_certificates(announce, sptg_grid, sptg_randoms, uniform_ptgs):
    def body():
        fx = fixture_a()
        assert check_equilibrium(fx.game, solve_sptg(fx.game)).passed
        bad = [i for i, (_, _, _, eq_ok) in enumerate(sptg_grid) if not eq_ok]
        bad += [i for i, (_, _, _, eq_ok) in enumerate(sptg_randoms) if not eq_ok]
        assert bad == []
        for g, res in uniform_ptgs:
            for cert in res.trace:
                assert check_equilibrium(cert.sptg, cert.solution, samples=2).passed

    announce(
        8,
        "no profitable deviation found by play probes or snapshot re-checks",
        body,
    )


def test_criterion_9_reset_layers(announce):
    def body():
        fx = maximizer_reset_loop()
        res = solve_ptg(fx.game)
        assert res.values == fx.expected["values"]
        assert res.values[0].is_constant_inf()
        assert res.stats.layers == fx.expected["layers"]
        d = len(fx.game.ladder) - 1
        assert res.stats.oracle_calls <= (fx.game.reset_depth + 1) * d
        reset_free = delayed_exit_jump()
        assert solve_ptg(reset_free.game).stats.layers == 1
        for seed in range(40):
            g = generate_random("ptg", 3, 3, seed)
            res = solve_ptg(g)
            assert res.stats.layers == g.reset_depth + 1
            d = len(g.ladder) - 1
            assert res.stats.oracle_calls <= (g.reset_depth + 1) * d

    announce(
        9,
        "reset unfolding uses reset-count-plus-one layers and bounded solves",
        body,
    )


def test_criterion_10_large_instances_are_fast(announce):
    def body():
        for seed in range(10):
            g = generate_random("sptg", 50, 4, seed)
            assert g.num_actions <= 200
            t0 = time.perf_counter()
            solve_sptg(g)
            dt = time.perf_counter() - t0
            assert dt < 5.0, (seed, dt)

    announce(10, "50-state games solve in under five seconds each", body)
