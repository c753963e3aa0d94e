"""Simple priced timed games: one clock on [0,1], no resets or guards.

States accrue cost at a per-state rate while time advances; actions are
instantaneous priced transitions, always available.  Values as functions
of the clock are piecewise linear with rational breakpoints and are
computed exactly by a right-to-left sweep: solve the untimed game at
time 1, then repeatedly solve a snapshot game whose waiting option costs
the current value plus an infinitesimal rate charge, and extend the
value functions linearly down to the next point where some state's best
choice changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional

from .numerics import EpsCost, F0, F1, INF, PwlFn, frac, is_inf
from .priced_game import (
    PAction,
    PricedGame,
    evaluate_profile,
    extended_dijkstra,
    potential_less,
    potential_matrix,
    rate_ladder_of,
    single_switch_iteration,
    strategy_iteration,
)

WAIT = None  # strategy-cell marker for the waiting choice


@dataclass(frozen=True)
class Sptg:
    owners: tuple  # 1 (minimizer) or 2 (maximizer) per state
    rates: tuple  # nonnegative Fraction per state
    actions: tuple  # PAction with Fraction or infinite costs

    def __post_init__(self):
        if len(self.rates) != len(self.owners):
            raise ValueError("rates and owners disagree on the state count")
        for k, r in enumerate(self.rates):
            if is_inf(r) or r < 0:
                raise ValueError(f"state {k} has a bad rate")
        # structural checks (ownership, sources, costs) ride on the core
        self.core  # noqa: B018

    @property
    def num_states(self) -> int:
        return len(self.owners)

    @property
    def num_actions(self) -> int:
        return len(self.actions)

    @cached_property
    def core(self) -> PricedGame:
        """The untimed game played when no time remains."""
        return PricedGame(self.owners, self.actions)

    def event_bound(self) -> int:
        """Bound on the number of event points of the value functions."""
        n = self.num_states
        return min(12**n, self.core.profile_bound())


@dataclass(frozen=True)
class SweepStep:
    """One snapshot solve: values are affine on [x_lo, x_hi)."""

    x_hi: Fraction
    x_lo: Fraction
    base: tuple  # value at x_hi per state
    rate: tuple  # slope coefficient: v_k(x) = base + rate*(x_hi - x)
    profile: tuple  # optimal snapshot-game profile (index >= m means wait)


@dataclass(frozen=True)
class TimedStrategyProfile:
    """Choices per clock region: cells [lo, hi) plus the point cell at 1.

    Each cell maps every state to an action index or WAIT.
    """

    cells: tuple  # (lo, hi, choices); lo == hi == 1 for the point cell

    def choice_at(self, state: int, x):
        x = frac(x)
        for lo, hi, choices in self.cells:
            if lo <= x < hi or (x == hi == F1 and lo == hi):
                return choices[state]
        raise ValueError(f"clock value {x} outside [0,1]")


@dataclass
class SolveStats:
    sweep_steps: int = 0
    event_points: int = 0  # distinct interior breakpoints across all states
    switch_count: int = 0
    potential_checks: int = 0
    potential_violations: int = 0


@dataclass(frozen=True)
class SptgSolution:
    values: tuple  # PwlFn per state on [0,1]
    strategy: TimedStrategyProfile
    stats: SolveStats
    trace: tuple  # SweepStep, right to left


def build_eps_game(sptg: Sptg, wait_costs) -> PricedGame:
    """Snapshot game at a clock value: the untimed game extended with a
    waiting action per state whose cost is the state's current value plus
    an infinitesimal charge proportional to its rate."""
    actions = [
        PAction(a.source, a.dest, EpsCost(a.cost, F0), None, a.label)
        for a in sptg.actions
    ]
    for k in range(sptg.num_states):
        wc = wait_costs[k]
        base = wc if not isinstance(wc, EpsCost) else wc.base
        actions.append(
            PAction(k, None, EpsCost(base, sptg.rates[k]), sptg.rates[k], f"wait{k}")
        )
    return PricedGame(sptg.owners, tuple(actions))


def solve_at_time_one(sptg: Sptg):
    """Values and a fully stabilised profile of the untimed game."""
    values, profile = extended_dijkstra(sptg.core)
    values2, profile, switches = strategy_iteration(sptg.core, profile)
    if values2 != values:
        raise AssertionError("normalisation changed the untimed game values")
    return values, profile, switches


def _line(sptg: Sptg, eps_game: PricedGame, j: int, base, rate):
    """Coefficients (A, S) of the snapshot-optimal line of action ``j``:
    its value at clock x'' is A + S*(x_hi - x'').  Returns None when the
    line is infinite."""
    a = eps_game.actions[j]
    if a.dest is None:
        da, dr = F0, F0
    else:
        da, dr = base[a.dest], rate[a.dest]
        if is_inf(da):
            return None
    if is_inf(a.cost.base):
        return None
    return (a.cost.base + da, a.cost.eps + dr)


def next_event_point(sptg: Sptg, eps_game: PricedGame, profile, base, rate, x_hi):
    """Largest clock value strictly below ``x_hi`` where some available
    action's line meets the chosen action's line, given they differ at
    ``x_hi`` itself; 0 when no such crossing exists."""
    best = F0
    for k in range(sptg.num_states):
        if is_inf(base[k]):
            continue
        sigma = _line(sptg, eps_game, profile[k], base, rate)
        if sigma is None:
            continue
        for j in eps_game.state_actions[k]:
            if j == profile[k]:
                continue
            cand = _line(sptg, eps_game, j, base, rate)
            if cand is None or cand[1] == sigma[1]:
                continue
            # A_j + d*S_j = A_s + d*S_s with d = x_hi - x''; lines tied
            # at x_hi cross at d = 0 and fall to the strict inequality
            d = (sigma[0] - cand[0]) / (cand[1] - sigma[1])
            xx = x_hi - d
            if F0 <= xx < x_hi and xx > best:
                best = xx
    return best


def solve_sptg(
    sptg: Sptg,
    inner: str = "dijkstra",
    instrument: bool = False,
    on_switch: Optional[Callable] = None,
) -> SptgSolution:
    """Exact value functions and optimal strategies on [0,1].

    ``inner`` selects how each snapshot game is solved: ``"dijkstra"``
    solves it from scratch, ``"iterate"`` improves the previous snapshot's
    profile by strategy iteration.  ``instrument=True`` forces the
    iterate path with one switch at a time and verifies that every switch
    strictly decreases the potential matrix; ``on_switch(matrix_before,
    matrix_after)`` additionally observes each recorded pair.
    """
    if inner not in ("dijkstra", "iterate"):
        raise ValueError(f"unknown inner solver {inner!r}")
    if instrument:
        inner = "iterate"
    stats = SolveStats()
    n = sptg.num_states
    m = sptg.num_actions
    ladder = rate_ladder_of(sptg.rates)

    v1, profile, sw = solve_at_time_one(sptg)
    stats.switch_count += sw
    segments = [[] for _ in range(n)]
    cells = [(F1, F1, tuple(profile))]
    trace = []

    x = F1
    v_at_x = list(v1)
    budget = sptg.event_bound() + 2
    for _ in range(budget):
        if x == F0:
            break
        eps_game = build_eps_game(sptg, v_at_x)

        if inner == "dijkstra":
            values, eps_profile = extended_dijkstra(eps_game)
            values2, eps_profile, sw = strategy_iteration(eps_game, eps_profile)
            if values2 != values:
                raise AssertionError("snapshot normalisation changed values")
            stats.switch_count += sw
        else:
            seed = tuple(profile)
            if instrument:
                hook = _potential_watcher(eps_game, ladder, stats, on_switch)
            else:
                hook = None
            values, eps_profile, sw = single_switch_iteration(eps_game, seed, hook)
            stats.switch_count += sw

        base, rate = [], []
        for k in range(n):
            vk = values[k]
            if isinstance(vk, EpsCost):
                base.append(vk.base)
                rate.append(vk.eps)
            else:
                base.append(vk)
                rate.append(F0)
            expect = v_at_x[k]
            if base[k] != expect and not (is_inf(base[k]) and is_inf(expect)):
                raise AssertionError(
                    f"snapshot value at state {k} broke continuity: "
                    f"{base[k]} != {expect}"
                )

        x_lo = next_event_point(sptg, eps_game, eps_profile, base, rate, x)
        for k in range(n):
            if is_inf(base[k]):
                segments[k].append((x_lo, x, INF, F0))
            else:
                segments[k].append((x_lo, x, base[k] + rate[k] * (x - x_lo), -rate[k]))
        cells.append(
            (x_lo, x, tuple(WAIT if j >= m else j for j in eps_profile))
        )
        trace.append(SweepStep(x, x_lo, tuple(base), tuple(rate), eps_profile))
        stats.sweep_steps += 1
        v_at_x = [
            INF if is_inf(base[k]) else base[k] + rate[k] * (x - x_lo) for k in range(n)
        ]
        profile = eps_profile
        x = x_lo
    else:
        raise RuntimeError("sweep exceeded its event-point budget")

    fns = tuple(PwlFn.from_segments(list(reversed(segs))) for segs in segments)
    interior = set()
    for f in fns:
        interior.update(f.interior_breaks())
    stats.event_points = len(interior)
    strategy = TimedStrategyProfile(tuple(reversed(cells)))
    return SptgSolution(fns, strategy, stats, tuple(trace))


def _potential_watcher(eps_game, ladder, stats, on_switch):
    def watch(game, before, j, after):
        p_before = potential_matrix(game, before, ladder)
        p_after = potential_matrix(game, after, ladder)
        stats.potential_checks += 1
        if not potential_less(p_after, p_before):
            stats.potential_violations += 1
        if on_switch is not None:
            on_switch(p_before, p_after)

    return watch
