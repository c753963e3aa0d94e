"""One-clock priced timed games over [0, M].

Actions carry existence intervals with independently open or closed
endpoints, and may reset the clock to 0.  Solving proceeds by three
reductions: resets are unfolded into layers counted by reset uses,
the time axis is cut at the interval endpoints into homogeneous pieces,
and each piece is rescaled to a simple priced timed game over [0,1]
whose waiting exits are rerouted through an auxiliary maximizer state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional

from .numerics import F0, F1, INF, PwlFn, frac, is_inf
from .priced_game import PAction, PricedGame, extended_dijkstra
from .sptg import Sptg, SptgSolution, solve_sptg


class PtgValidationError(ValueError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class TAction:
    source: int
    dest: Optional[int]  # None = terminal
    cost: object  # Fraction | INF
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True
    reset: bool = False
    label: Optional[str] = None

    def available_at(self, x) -> bool:
        if self.lo < x < self.hi:
            return True
        if x == self.lo and self.lo_closed:
            return True
        if x == self.hi and self.hi_closed:
            return True
        return False


@dataclass(frozen=True)
class Ptg:
    owners: tuple
    rates: tuple
    actions: tuple  # TAction

    def __post_init__(self):
        n = len(self.owners)
        if len(self.rates) != n:
            raise PtgValidationError("state-count", "rates and owners disagree")
        for k, o in enumerate(self.owners):
            if o not in (1, 2):
                raise PtgValidationError("bad-owner", f"state {k} has owner {o}")
        for k, r in enumerate(self.rates):
            if is_inf(r) or r < 0:
                raise PtgValidationError("negative-rate", f"state {k}")
        for i, a in enumerate(self.actions):
            if not 0 <= a.source < n:
                raise PtgValidationError("dangling-reference", f"action {i} source")
            if a.dest is not None and not 0 <= a.dest < n:
                raise PtgValidationError("dangling-reference", f"action {i} dest")
            if not is_inf(a.cost) and a.cost < 0:
                raise PtgValidationError("negative-cost", f"action {i}")
            if a.lo < 0 or a.lo > a.hi:
                raise PtgValidationError("bad-interval", f"action {i}")
            if a.lo == a.hi and not (a.lo_closed and a.hi_closed):
                raise PtgValidationError("bad-interval", f"action {i} is empty")
            if a.reset and a.dest is None:
                raise PtgValidationError("reset-to-terminal", f"action {i}")
        if self.horizon == F0:
            raise PtgValidationError("degenerate-horizon", "no action extends past 0")
        for k in range(n):
            if not any(
                a.source == k and a.available_at(self.horizon) for a in self.actions
            ):
                raise PtgValidationError(
                    "no-horizon-action", f"state {k} has no action at time {self.horizon}"
                )

    @property
    def num_states(self) -> int:
        return len(self.owners)

    @cached_property
    def horizon(self) -> Fraction:
        return max(a.hi for a in self.actions)

    @cached_property
    def ladder(self) -> tuple:
        """Distinct interval endpoints plus 0, descending."""
        pts = {F0}
        for a in self.actions:
            pts.add(a.lo)
            pts.add(a.hi)
        return tuple(sorted(pts, reverse=True))

    @cached_property
    def reset_depth(self) -> int:
        """Distinct states that reset actions lead to."""
        return len({a.dest for a in self.actions if a.reset})

    def available(self, x):
        """Indices of actions whose interval contains x."""
        return [i for i, a in enumerate(self.actions) if a.available_at(x)]


@dataclass(frozen=True)
class IntervalCert:
    """Provenance of the value functions on one open ladder interval."""

    lo: Fraction
    hi: Fraction
    sample: Fraction  # interior clock value fixing availability
    sptg: Sptg
    solution: SptgSolution


@dataclass
class PtgStats:
    oracle_calls: int = 0  # interval-game solves
    priced_solves: int = 0
    layers: int = 1


@dataclass(frozen=True)
class PtgResult:
    values: tuple  # PwlFn per state over [0, horizon]
    ladder: tuple  # descending
    trace: tuple  # IntervalCert, right to left
    stats: PtgStats
    # Only epsilon-optimal strategies are guaranteed to exist: at a jump
    # of the value function the optimum may be a limit of ever-shorter
    # waits and never attained.
    optimality_note: str = "values are exact; strategies epsilon-optimal"

    def jump_points(self, state: int):
        """Ladder points where the value differs from a one-sided limit."""
        f = self.values[state]
        out = []
        for t in self.ladder:
            i = f.breaks.index(t) if t in f.breaks else None
            if i is None:
                continue
            pv = f.point_vals[i]
            jump = False
            if i > 0 and f.eval(t, side="left") != pv:
                jump = True
            if i < len(f.seg_vals) and f.eval(t, side="right") != pv:
                jump = True
            if jump:
                out.append(t)
        return out


def build_moment_game(game: Ptg, v, x) -> PricedGame:
    """Snapshot priced game at clock x: the actions available at x plus
    a stop action per state collecting that state's entry of ``v``."""
    actions = []
    for i in game.available(x):
        a = game.actions[i]
        actions.append(PAction(a.source, a.dest, a.cost, None, a.label))
    for k in range(game.num_states):
        actions.append(PAction(k, None, v[k], None, f"stop{k}"))
    return PricedGame(game.owners, tuple(actions))


def build_interval_sptg(game: Ptg, v_prime, x, width) -> Sptg:
    """Rescale one homogeneous availability interval to an SPTG on [0,1].

    Actions available at the interior point x survive with their original
    destinations; each state gains a stop action worth that state's entry
    of ``v_prime``, usable only at time 1.  For minimizer states the stop
    action routes through a fresh maximizer state with the top rate and a
    free exit, which prices early stopping out of the optimum; maximizer
    stop actions go to the terminal directly.  Rates scale by the width.
    """
    width = frac(width)
    if width <= 0:
        raise PtgValidationError("bad-interval", f"width {width}")
    n = game.num_states
    max_state = n
    top_rate = max(game.rates, default=F0) * width
    actions = []
    for i in game.available(x):
        a = game.actions[i]
        if a.reset:
            raise PtgValidationError("reset-present", f"action {i}")
        actions.append(PAction(a.source, a.dest, a.cost, None, a.label))
    for k in range(n):
        dest = max_state if game.owners[k] == 1 else None
        actions.append(PAction(k, dest, v_prime[k], None, f"stop{k}"))
    actions.append(PAction(max_state, None, F0, None, "exit-max"))
    return Sptg(
        owners=game.owners + (2,),
        rates=tuple(r * width for r in game.rates) + (top_rate,),
        actions=tuple(actions),
    )


def transform_endpoint_actions(game: Ptg) -> Sptg:
    """Turn a [0,1]-normalised game whose only other intervals are the
    point [1,1] into an SPTG: maximizer point exits widen to [0,1]
    unchanged, minimizer point exits reroute through a fresh maximizer
    state with the top rate and a free exit.  Adds exactly one state and
    one action."""
    n = game.num_states
    max_state = n
    actions = []
    for i, a in enumerate(game.actions):
        if a.reset:
            raise PtgValidationError("reset-present", f"action {i}")
        if (a.lo, a.hi) == (F0, F1):
            actions.append(PAction(a.source, a.dest, a.cost, None, a.label))
        elif (a.lo, a.hi) == (F1, F1):
            if a.dest is not None:
                raise PtgValidationError(
                    "bad-interval", f"point action {i} must target the terminal"
                )
            dest = max_state if game.owners[a.source] == 1 else None
            actions.append(PAction(a.source, dest, a.cost, None, a.label))
        else:
            raise PtgValidationError("bad-interval", f"action {i} is not [0,1] or [1,1]")
    actions.append(PAction(max_state, None, F0, None, "exit-max"))
    return Sptg(
        owners=game.owners + (2,),
        rates=game.rates + (max(game.rates, default=F0),),
        actions=tuple(actions),
    )


def prune_dominated(sptg: Sptg) -> Sptg:
    """Drop parallel actions: per source/destination pair keep only the
    cost best for the source's owner."""
    best = {}
    for i, a in enumerate(sptg.actions):
        key = (a.source, a.dest)
        cur = best.get(key)
        if cur is None:
            best[key] = i
            continue
        c_cur = sptg.actions[cur].cost
        prefer = a.cost < c_cur if sptg.owners[a.source] == 1 else a.cost > c_cur
        if prefer:
            best[key] = i
    keep = sorted(best.values())
    return Sptg(sptg.owners, sptg.rates, tuple(sptg.actions[i] for i in keep))


def _remap(fn: PwlFn, lo, width) -> list:
    """Segments of x -> fn((x - lo) / width), for splicing into [lo, lo+width]."""
    return [
        (lo + s_lo * width, lo + s_hi * width, val, slope / width)
        for s_lo, s_hi, val, slope in fn.segments()
    ]


def _strip_resets(game: Ptg, reset_zero_values) -> Ptg:
    """Replace reset actions by terminal exits priced at the action cost
    plus the destination's clock-0 value in the next layer (infinite in
    the deepest layer)."""
    actions = []
    for a in game.actions:
        if not a.reset:
            actions.append(a)
            continue
        extra = INF if reset_zero_values is None else reset_zero_values[a.dest]
        cost = INF if (is_inf(a.cost) or is_inf(extra)) else a.cost + extra
        actions.append(
            TAction(a.source, None, cost, a.lo, a.hi, a.lo_closed, a.hi_closed,
                    False, a.label)
        )
    return Ptg(game.owners, game.rates, tuple(actions))


def _solve_reset_free(game: Ptg, stats: PtgStats) -> PtgResult:
    n = game.num_states
    ladder = game.ladder
    top = ladder[0]
    avail_top = [game.actions[i] for i in game.available(top)]
    top_game = PricedGame(
        game.owners,
        tuple(PAction(a.source, a.dest, a.cost, None, a.label) for a in avail_top),
    )
    point_vals = {top: list(extended_dijkstra(top_game)[0])}
    stats.priced_solves += 1

    segments = [[] for _ in range(n)]
    trace = []
    for i in range(1, len(ladder)):
        hi, lo = ladder[i - 1], ladder[i]
        width = hi - lo
        x = (hi + lo) / 2
        moment = build_moment_game(game, point_vals[hi], x)
        v_prime = extended_dijkstra(moment)[0]
        stats.priced_solves += 1
        sptg = build_interval_sptg(game, v_prime, x, width)
        sol = solve_sptg(sptg)
        stats.oracle_calls += 1
        trace.append(IntervalCert(lo, hi, x, sptg, sol))
        for k in range(n):
            segments[k].append(_remap(sol.values[k], lo, width))
        zero_vals = [sol.values[k].eval(F0) for k in range(n)]
        moment0 = build_moment_game(game, zero_vals, lo)
        point_vals[lo] = list(extended_dijkstra(moment0)[0])
        stats.priced_solves += 1

    fns = []
    for k in range(n):
        overrides = {t: vs[k] for t, vs in point_vals.items()}
        flat = [seg for block in reversed(segments[k]) for seg in block]
        fns.append(PwlFn.from_segments(flat, overrides))
    return PtgResult(tuple(fns), ladder, tuple(trace), stats)


def solve_ptg(game: Ptg) -> PtgResult:
    """Exact value functions over [0, horizon].

    Reset layers are solved deepest first; each layer's clock-0 values
    price the previous layer's reset actions as terminal exits.
    """
    stats = PtgStats(layers=game.reset_depth + 1)
    result = None
    zero_values = None
    for _ in range(game.reset_depth, -1, -1):
        layer = _strip_resets(game, zero_values) if game.reset_depth else game
        result = _solve_reset_free(layer, stats)
        zero_values = [f.eval(F0) for f in result.values]
    return result
