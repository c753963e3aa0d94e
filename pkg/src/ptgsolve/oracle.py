"""Independent verification machinery.

Everything here recomputes results by routes disjoint from the sweep
solver: backward-induction value iteration over piecewise linear
functions, play simulation under explicit strategies, brute-force
enumeration for untimed games, and seeded random instance generation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .numerics import (
    F0,
    F1,
    INF,
    PwlFn,
    frac,
    is_inf,
    max_envelope,
    min_envelope,
    wait_closure,
)
from .priced_game import PAction, PricedGame, evaluate_profile, improving_switches
from .ptg import Ptg, TAction
from .sptg import WAIT, Sptg, SptgSolution, TimedStrategyProfile, build_eps_game


class OracleError(RuntimeError):
    pass


# -- value iteration --------------------------------------------------------


@dataclass(frozen=True)
class ValueIterationResult:
    values: tuple  # PwlFn per state
    iterations: int


def value_iteration_sptg(sptg: Sptg, cap: Optional[int] = None) -> ValueIterationResult:
    """Backward induction on the number of transitions taken.

    Starts from the all-infinite vector and applies one round of
    best-action envelopes followed by waiting closure per iteration,
    stopping at an exact fixpoint.  Raises when the cap is hit first.
    """
    n = sptg.num_states
    if cap is None:
        cap = n * sptg.core.profile_bound() + 1
    fns = tuple(PwlFn.constant(F0, F1, INF) for _ in range(n))
    for it in range(1, cap + 1):
        new = []
        for k in range(n):
            cands = []
            for j in sptg.core.state_actions[k]:
                a = sptg.actions[j]
                if is_inf(a.cost):
                    cands.append(PwlFn.constant(F0, F1, INF))
                elif a.dest is None:
                    cands.append(PwlFn.constant(F0, F1, a.cost))
                else:
                    cands.append(fns[a.dest].offset(a.cost))
            if sptg.owners[k] == 1:
                env = min_envelope(cands)
                new.append(wait_closure(env, sptg.rates[k], "min"))
            else:
                env = max_envelope(cands)
                new.append(wait_closure(env, sptg.rates[k], "max"))
        new = tuple(new)
        if new == fns:
            return ValueIterationResult(new, it)
        fns = new
    raise OracleError(f"no fixpoint within {cap} iterations")


# -- play simulation --------------------------------------------------------


@dataclass(frozen=True)
class PlayStep:
    state: int
    time: Fraction
    action: Optional[int]  # None = waiting
    delay: Fraction


@dataclass(frozen=True)
class Play:
    steps: tuple
    terminal: bool
    cost: object  # Fraction | INF


def simulate(sptg: Sptg, profile: TimedStrategyProfile, start) -> Play:
    """Deterministic play of both players following the profile from a
    (state, time) configuration.  A configuration revisit at equal time
    certifies an infinite play of infinite cost."""
    k, x = start
    x = frac(x)
    steps = []
    cost = F0
    seen = set()
    while k is not None:
        if (k, x) in seen:
            return Play(tuple(steps), False, INF)
        seen.add((k, x))
        choice = profile.choice_at(k, x)
        if choice is WAIT:
            if x == F1:
                raise OracleError(f"profile waits at the horizon in state {k}")
            hi = min(c_hi for lo, c_hi, _ in profile.cells if lo <= x < c_hi)
            delay = hi - x
            cost = cost + sptg.rates[k] * delay
            steps.append(PlayStep(k, x, None, delay))
            x = hi
        else:
            a = sptg.actions[choice]
            if a.source != k:
                raise OracleError(f"profile picks a foreign action at state {k}")
            cost = cost + a.cost
            steps.append(PlayStep(k, x, choice, F0))
            k = a.dest
    return Play(tuple(steps), True, cost if not is_inf(cost) else INF)


def simulate_ptg(game: Ptg, chooser, start, max_steps: int = 10_000) -> Play:
    """Play a timed game under an explicit decision function.

    ``chooser(state, time, resets_used)`` returns ``("wait", delay)`` or
    ``("move", action_index)``.  A configuration revisit at equal time
    and reset count certifies cost infinity.
    """
    k, x = start
    x = frac(x)
    steps = []
    cost = F0
    resets = 0
    seen = set()
    for _ in range(max_steps):
        if k is None:
            return Play(tuple(steps), True, cost if not is_inf(cost) else INF)
        if (k, x, resets) in seen:
            return Play(tuple(steps), False, INF)
        seen.add((k, x, resets))
        kind, arg = chooser(k, x, resets)
        if kind == "wait":
            delay = frac(arg)
            if delay < 0 or x + delay > game.horizon:
                raise OracleError(f"bad delay {arg} at time {x}")
            cost = cost + game.rates[k] * delay
            steps.append(PlayStep(k, x, None, delay))
            x = x + delay
        else:
            a = game.actions[arg]
            if a.source != k or not a.available_at(x):
                raise OracleError(f"action {arg} unavailable at ({k}, {x})")
            cost = cost + a.cost
            steps.append(PlayStep(k, x, arg, F0))
            k = a.dest
            if a.reset:
                x = F0
                resets += 1
    raise OracleError("simulation step budget exceeded")


# -- equilibrium checking ---------------------------------------------------


@dataclass
class EquilibriumReport:
    passed: bool = True
    probe_failures: list = field(default_factory=list)  # (state, time, got, want)
    cell_failures: list = field(default_factory=list)  # (step_index, player, action)

    def fail_probe(self, state, t, got, want):
        self.passed = False
        self.probe_failures.append((state, t, got, want))

    def fail_cell(self, idx, player, action):
        self.passed = False
        self.cell_failures.append((idx, player, action))


def check_equilibrium(sptg: Sptg, sol: SptgSolution, samples: int = 50) -> EquilibriumReport:
    """Certify a solved game two ways: simulated play cost must equal the
    value function at every probed time, and the recorded snapshot game
    of every sweep step must admit no improving switch for either
    player."""
    report = EquilibriumReport()
    times = set()
    for lo, hi, _ in sol.strategy.cells:
        times.add(lo)
        if lo < hi:
            times.add((lo + hi) / 2)
    times.add(F1)
    grid = samples + 1
    for i in range(grid + 1):
        times.add(Fraction(i, grid))
    for k in range(sptg.num_states):
        for t in sorted(times):
            got = simulate(sptg, sol.strategy, (k, t)).cost
            want = sol.values[k].eval(t)
            if got != want and not (is_inf(got) and is_inf(want)):
                report.fail_probe(k, t, got, want)
    for idx, step in enumerate(sol.trace):
        eps_game = build_eps_game(sptg, step.base)
        for player in (1, 2):
            for j, _ in improving_switches(eps_game, step.profile, player):
                report.fail_cell(idx, player, j)
    return report


# -- brute force ------------------------------------------------------------


def brute_force_priced(game: PricedGame, budget: int = 10**6):
    """Per-state value by exhaustive strategy enumeration: the best the
    maximizer can guarantee against the minimizer's best response."""
    total = 1
    for js in game.state_actions:
        total *= len(js)
    if total > budget:
        raise OracleError(f"{total} profiles exceed the enumeration budget {budget}")
    n = game.num_states
    p1_states = [k for k in range(n) if game.owners[k] == 1]
    p2_states = [k for k in range(n) if game.owners[k] == 2]
    best = [None] * n
    for picks2 in itertools.product(*(game.state_actions[k] for k in p2_states)):
        inner = [None] * n
        for picks1 in itertools.product(*(game.state_actions[k] for k in p1_states)):
            prof = [None] * n
            for k, j in zip(p2_states, picks2):
                prof[k] = j
            for k, j in zip(p1_states, picks1):
                prof[k] = j
            vals, _ = evaluate_profile(game, tuple(prof))
            for k in range(n):
                u = vals[k].payoff
                if inner[k] is None or u < inner[k]:
                    inner[k] = u
        for k in range(n):
            if best[k] is None or inner[k] > best[k]:
                best[k] = inner[k]
    return best


# -- random instances -------------------------------------------------------


def _rng(kind, n, max_actions, seed):
    return random.Random(f"{kind}/{n}/{max_actions}/{seed}")


def generate_random(
    kind: str,
    n: int,
    max_actions: int = 3,
    seed: int = 0,
    *,
    one_player: bool = False,
    allow_inf: bool = False,
    rate_one_cost_zero: bool = False,
    resets: bool = True,
):
    """Seed-deterministic random instance that always passes validation.

    Rates and costs are small integers; PTG intervals use at most three
    distinct endpoints and at most n reset actions.
    """
    if n < 1:
        raise ValueError("need at least one state")
    rng = _rng(kind, n, max_actions, seed)

    def owner():
        return 1 if one_player else rng.choice((1, 2))

    def rate():
        return F1 if rate_one_cost_zero else Fraction(rng.randint(0, 4))

    def cost():
        if rate_one_cost_zero:
            return F0
        if allow_inf and rng.random() < 1 / 8:
            return INF
        return Fraction(rng.randint(0, 4))

    def dest():
        # lean towards the terminal so most instances have finite values
        return None if rng.random() < 0.4 else rng.randrange(n)

    owners = tuple(owner() for _ in range(n))
    rates = tuple(rate() for _ in range(n))

    if kind == "priced":
        actions = []
        for k in range(n):
            for _ in range(rng.randint(1, max_actions)):
                actions.append(PAction(k, dest(), cost()))
        return PricedGame(owners, tuple(actions))

    if kind == "sptg":
        actions = []
        for k in range(n):
            for _ in range(rng.randint(1, max_actions)):
                actions.append(PAction(k, dest(), cost()))
        return Sptg(owners, rates, tuple(actions))

    if kind == "ptg":
        horizon = Fraction(rng.choice((1, 2)))
        pool = [F0, horizon]
        if rng.random() < 0.7:
            pool.append(horizon * Fraction(rng.choice((1, 2, 3)), 4))
        pool = sorted(set(pool))
        reset_budget = n if resets else 0
        actions = []
        for k in range(n):
            count = rng.randint(1, max_actions)
            for idx in range(count):
                d = dest()
                if idx == 0:
                    lo, hi = rng.choice(pool), horizon
                    lo_c, hi_c = rng.random() < 0.8 or lo == hi, True
                else:
                    lo, hi = sorted(rng.sample(pool, 2)) if len(pool) > 1 else (F0, horizon)
                    lo = Fraction(lo)
                    hi = Fraction(hi)
                    lo_c = rng.random() < 0.8 or lo == hi
                    hi_c = rng.random() < 0.8 or lo == hi
                reset = False
                if d is not None and reset_budget > 0 and rng.random() < 0.2:
                    reset = True
                    reset_budget -= 1
                actions.append(
                    TAction(k, d, cost(), Fraction(lo), Fraction(hi), lo_c, hi_c, reset)
                )
        return Ptg(owners, rates, tuple(actions))

    raise ValueError(f"unknown kind {kind!r}")
