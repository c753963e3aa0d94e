from fractions import Fraction as Fr

import pytest

from ptgsolve.fixtures import delayed_exit_jump, maximizer_reset_loop
from ptgsolve.numerics import F0, F1, INF, PwlFn, is_inf
from ptgsolve.oracle import generate_random, simulate_ptg
from ptgsolve.ptg import (
    Ptg,
    PtgValidationError,
    TAction,
    build_interval_sptg,
    build_moment_game,
    prune_dominated,
    solve_ptg,
    transform_endpoint_actions,
)
from ptgsolve.sptg import Sptg, solve_sptg


def act(source, dest, cost, lo, hi, **kw):
    return TAction(source, dest, Fr(cost), Fr(lo), Fr(hi), **kw)


def simple(*actions, owners=(1,), rates=(1,)):
    return Ptg(tuple(owners), tuple(Fr(r) for r in rates), tuple(actions))


class TestValidation:
    def expect(self, code, *actions, owners=(1,), rates=(1,)):
        with pytest.raises(PtgValidationError) as exc:
            simple(*actions, owners=owners, rates=rates)
        assert exc.value.code == code

    def test_state_count(self):
        self.expect("state-count", act(0, None, 0, 0, 1), owners=(1,), rates=(1, 1))

    def test_bad_owner(self):
        self.expect("bad-owner", act(0, None, 0, 0, 1), owners=(3,))

    def test_negative_rate(self):
        self.expect("negative-rate", act(0, None, 0, 0, 1), rates=(-1,))

    def test_dangling_source(self):
        self.expect("dangling-reference", act(5, None, 0, 0, 1), act(0, None, 0, 0, 1))

    def test_dangling_dest(self):
        self.expect("dangling-reference", act(0, 5, 0, 0, 1), act(0, None, 0, 0, 1))

    def test_negative_cost(self):
        self.expect("negative-cost", act(0, None, -1, 0, 1))

    def test_interval_backwards(self):
        self.expect("bad-interval", act(0, None, 0, 1, 0))

    def test_interval_empty_open_point(self):
        self.expect(
            "bad-interval",
            act(0, None, 0, 1, 1, lo_closed=False),
            act(0, None, 0, 0, 1),
        )

    def test_reset_to_terminal(self):
        self.expect("reset-to-terminal", act(0, None, 0, 0, 1, reset=True))

    def test_degenerate_horizon(self):
        self.expect("degenerate-horizon", act(0, None, 0, 0, 0))

    def test_no_horizon_action(self):
        self.expect(
            "no-horizon-action",
            act(0, None, 0, 0, 1),
            act(1, None, 0, 0, 1, hi_closed=False),
            owners=(1, 1),
            rates=(1, 1),
        )

    def test_availability_respects_open_ends(self):
        a = act(0, None, 0, 0, 1, lo_closed=False, hi_closed=False)
        assert not a.available_at(F0) and not a.available_at(F1)
        assert a.available_at(Fr(1, 2))


class TestMomentGame:
    def test_filters_by_availability_and_adds_stops(self):
        g = simple(
            act(0, None, 3, 0, 1),
            act(0, None, 7, 1, 1),
        )
        m = build_moment_game(g, [Fr(9)], Fr(1, 2))
        assert [a.cost for a in m.actions] == [Fr(3), Fr(9)]
        assert m.actions[-1].label == "stop0"
        m1 = build_moment_game(g, [Fr(9)], F1)
        assert [a.cost for a in m1.actions] == [Fr(3), Fr(7), Fr(9)]


class TestIntervalSptg:
    def game(self):
        return Ptg(
            (1, 2),
            (Fr(2), Fr(3)),
            (
                act(0, 1, 1, 0, 1, label="go"),
                act(1, None, 0, 1, 1, label="out"),
                act(1, None, 5, 0, 1, label="early"),
            ),
        )

    def test_width_one_fields(self):
        g = self.game()
        s = build_interval_sptg(g, [Fr(4), Fr(6)], Fr(1, 2), F1)
        assert s.owners == (1, 2, 2)
        assert s.rates == (Fr(2), Fr(3), Fr(3))
        # available actions survive; the point-[1,1] exit does not
        labels = [a.label for a in s.actions]
        assert labels == ["go", "early", "stop0", "stop1", "exit-max"]
        stop0 = s.actions[2]
        stop1 = s.actions[3]
        assert stop0.dest == 2 and stop0.cost == Fr(4)  # minimizer routes via max
        assert stop1.dest is None and stop1.cost == Fr(6)  # maximizer exits directly
        assert s.actions[4].cost == F0

    def test_rates_scale_with_width(self):
        s = build_interval_sptg(self.game(), [F0, F0], Fr(1, 2), Fr(1, 3))
        assert s.rates == (Fr(2, 3), F1, F1)

    def test_nonpositive_width_rejected(self):
        with pytest.raises(PtgValidationError) as exc:
            build_interval_sptg(self.game(), [F0, F0], Fr(1, 2), F0)
        assert exc.value.code == "bad-interval"

    def test_reset_rejected(self):
        g = Ptg(
            (1,),
            (F1,),
            (act(0, 0, 0, 0, 1, reset=True), act(0, None, 0, 0, 1)),
        )
        with pytest.raises(PtgValidationError) as exc:
            build_interval_sptg(g, [F0], Fr(1, 2), F1)
        assert exc.value.code == "reset-present"


class TestEndpointTransform:
    def test_vacuous_when_everything_spans(self):
        g = simple(act(0, None, 2, 0, 1))
        s = transform_endpoint_actions(g)
        assert s.num_states == g.num_states + 1
        assert s.num_actions == len(g.actions) + 1
        assert s.actions[0].dest is None and s.actions[0].cost == Fr(2)

    def test_minimizer_point_exit_prices_the_wait(self):
        g = simple(act(0, None, 0, 1, 1))
        s = transform_endpoint_actions(g)
        sol = solve_sptg(s)
        assert sol.values[0] == PwlFn.affine(F0, F1, F1, Fr(-1))

    def test_maximizer_point_exit_stays_terminal(self):
        g = simple(act(0, None, 0, 1, 1), owners=(2,))
        s = transform_endpoint_actions(g)
        assert s.actions[0].dest is None
        assert solve_sptg(s).values[0] == PwlFn.affine(F0, F1, F1, Fr(-1))

    def test_point_action_to_state_rejected(self):
        g = simple(act(0, 0, 0, 1, 1), act(0, None, 0, 0, 1))
        with pytest.raises(PtgValidationError) as exc:
            transform_endpoint_actions(g)
        assert exc.value.code == "bad-interval"

    def test_interior_interval_rejected(self):
        g = simple(act(0, None, 0, 0, 1), act(0, None, 0, 1, 2, lo_closed=False))
        with pytest.raises(PtgValidationError) as exc:
            transform_endpoint_actions(g)
        assert exc.value.code == "bad-interval"


class TestPrune:
    def test_keeps_owner_best_parallel_action(self):
        from ptgsolve.priced_game import PAction

        s = Sptg(
            (1, 2),
            (F0, F0),
            (
                PAction(0, None, Fr(3)),
                PAction(0, None, Fr(1)),
                PAction(1, None, Fr(3)),
                PAction(1, None, Fr(1)),
            ),
        )
        p = prune_dominated(s)
        assert [a.cost for a in p.actions] == [Fr(1), Fr(3)]
        assert solve_sptg(p).values == solve_sptg(s).values


class TestSolvePtg:
    def test_delayed_exit_jump(self):
        fx = delayed_exit_jump()
        res = solve_ptg(fx.game)
        assert res.values == fx.expected["values"]
        for k, pts in fx.expected["jump_points"].items():
            assert res.jump_points(k) == pts

    def test_maximizer_reset_loop_is_infinite(self):
        fx = maximizer_reset_loop()
        res = solve_ptg(fx.game)
        assert res.values == fx.expected["values"]
        assert res.stats.layers == fx.expected["layers"]

    def test_reset_free_game_uses_one_layer(self):
        g = simple(act(0, None, 0, 0, 1))
        res = solve_ptg(g)
        assert res.stats.layers == 1

    def test_dominated_reset_changes_nothing(self):
        with_reset = Ptg(
            (1, 1),
            (F1, F1),
            (
                act(0, None, 0, 0, 1, label="exit"),
                act(0, 1, 100, 0, 1, reset=True, label="bad"),
                act(1, None, 0, 0, 1),
            ),
        )
        without = Ptg(
            (1, 1),
            (F1, F1),
            (act(0, None, 0, 0, 1, label="exit"), act(1, None, 0, 0, 1)),
        )
        a = solve_ptg(with_reset)
        b = solve_ptg(without)
        assert a.values == b.values
        assert a.stats.layers == 2 and b.stats.layers == 1

    def test_long_horizon_scaling(self):
        g = Ptg((2,), (F1,), (act(0, None, 0, 2, 2),))
        res = solve_ptg(g)
        assert res.values[0] == PwlFn.affine(F0, Fr(2), Fr(2), Fr(-1))

    def test_full_span_game_matches_direct_sweep(self):
        for seed in range(30):
            core = generate_random("sptg", 3, 3, seed)
            actions = tuple(
                act(a.source, a.dest, a.cost, 0, 1) for a in core.actions
            )
            g = Ptg(core.owners, core.rates, actions)
            res = solve_ptg(g)
            direct = solve_sptg(core)
            assert res.values == direct.values, seed

    def test_jump_points_lie_on_the_ladder(self):
        for seed in range(30):
            g = generate_random("ptg", 3, 3, seed)
            res = solve_ptg(g)
            for k in range(g.num_states):
                assert set(res.jump_points(k)) <= set(res.ladder)

    def test_interval_certificates_replay_exactly(self):
        for seed in range(20):
            g = generate_random("ptg", 3, 3, seed, resets=False)
            res = solve_ptg(g)
            for cert in res.trace:
                width = cert.hi - cert.lo
                for frac_x in (Fr(1, 7), Fr(1, 2), Fr(6, 7)):
                    x = cert.lo + frac_x * width
                    for k in range(g.num_states):
                        assert res.values[k].eval(x) == cert.solution.values[k].eval(frac_x)

    def test_solve_budget(self):
        for seed in range(30):
            g = generate_random("ptg", 3, 3, seed)
            res = solve_ptg(g)
            d = len(g.ladder) - 1
            assert res.stats.oracle_calls <= (g.reset_depth + 1) * d


class TestEpsilonOptimalPlay:
    def test_short_waits_approach_the_jump_value(self):
        fx = delayed_exit_jump()
        g = fx.game
        for delta in (Fr(1, 10), Fr(1, 100)):
            def chooser(k, x, resets, delta=delta):
                if k == 0:
                    return ("wait", delta) if x == F0 else ("move", 0)
                # the maximizer missed the expensive exit; only the free
                # horizon exit remains reachable
                return ("move", 2) if x == F1 else ("wait", F1 - x)

            play = simulate_ptg(g, chooser, (0, F0))
            assert play.terminal
            assert play.cost == delta  # within delta of the value 0

    def test_maximizer_cashes_at_zero_without_the_wait(self):
        g = delayed_exit_jump().game

        def chooser(k, x, resets):
            if k == 0:
                return ("move", 0)
            return ("move", 1) if x == F0 else ("move", 2)

        play = simulate_ptg(g, chooser, (0, F0))
        assert play.cost == F1  # the jump value at time 0
