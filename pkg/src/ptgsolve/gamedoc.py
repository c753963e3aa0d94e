"""Game-description documents and result serialization.

Documents are JSON with a fixed schema; every number is carried as an
exact rational string ("p/q"), an integer, or "inf".  Parsing reports a
diagnostic code and the offending location instead of raising bare
exceptions, and serialization is canonical so identical inputs yield
byte-identical outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .numerics import F0, F1, format_cost, is_inf, parse_cost
from .priced_game import PAction, PricedGame
from .ptg import Ptg, PtgResult, TAction
from .sptg import WAIT, Sptg, SptgSolution

FORMAT_VERSION = 1


class DocumentError(ValueError):
    def __init__(self, code: str, where: str, message: str):
        self.code = code
        self.where = where
        super().__init__(f"{code} at {where}: {message}")


@dataclass(frozen=True)
class DocState:
    id: str
    owner: int
    rate: Fraction


@dataclass(frozen=True)
class DocAction:
    id: str
    source: str
    dest: Optional[str]  # None = terminal ("bot")
    cost: object
    interval: Optional[tuple] = None  # (lo, hi, lo_closed, hi_closed)
    reset: bool = False


@dataclass(frozen=True)
class GameDocument:
    kind: str  # priced | sptg | ptg
    states: tuple
    actions: tuple

    @property
    def state_ids(self):
        return [s.id for s in self.states]

    def state_index(self, sid: str) -> int:
        return self.state_ids.index(sid)

    def to_game(self):
        idx = {s.id: i for i, s in enumerate(self.states)}
        owners = tuple(s.owner for s in self.states)
        rates = tuple(s.rate for s in self.states)
        if self.kind == "ptg":
            actions = tuple(
                TAction(
                    idx[a.source],
                    None if a.dest is None else idx[a.dest],
                    a.cost,
                    a.interval[0],
                    a.interval[1],
                    a.interval[2],
                    a.interval[3],
                    a.reset,
                    a.id,
                )
                for a in self.actions
            )
            return Ptg(owners, rates, actions)
        actions = tuple(
            PAction(idx[a.source], None if a.dest is None else idx[a.dest], a.cost, None, a.id)
            for a in self.actions
        )
        if self.kind == "sptg":
            return Sptg(owners, rates, actions)
        return PricedGame(owners, actions)


def _require(obj, field, where):
    if field not in obj:
        raise DocumentError("missing-field", where, f"expected {field!r}")
    return obj[field]


def _no_extras(obj, allowed, where):
    for key in obj:
        if key not in allowed:
            raise DocumentError("unknown-field", where, f"unexpected {key!r}")


def _number(raw, where, *, allow_inf=False):
    try:
        value = parse_cost(raw)
    except (ValueError, ZeroDivisionError, TypeError):
        raise DocumentError("bad-number", where, f"cannot parse {raw!r}")
    if is_inf(value) and not allow_inf:
        raise DocumentError("bad-number", where, "inf not allowed here")
    return value


def parse(text: str) -> GameDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("bad-json", f"line {exc.lineno}", exc.msg)
    if not isinstance(raw, dict):
        raise DocumentError("bad-json", "document", "expected an object")
    _no_extras(raw, {"format", "kind", "states", "actions"}, "document")
    version = _require(raw, "format", "document")
    if version != FORMAT_VERSION:
        raise DocumentError("bad-version", "document", f"unsupported format {version!r}")
    kind = _require(raw, "kind", "document")
    if kind not in ("priced", "sptg", "ptg"):
        raise DocumentError("bad-kind", "document", f"unknown kind {kind!r}")

    states = []
    ids = set()
    for i, s in enumerate(_require(raw, "states", "document")):
        where = f"states[{i}]"
        _no_extras(s, {"id", "owner", "rate"}, where)
        sid = str(_require(s, "id", where))
        if sid in ids or sid == "bot":
            raise DocumentError("duplicate-id", where, sid)
        ids.add(sid)
        owner = _require(s, "owner", where)
        if owner not in (1, 2):
            raise DocumentError("bad-owner", where, f"owner {owner!r}")
        rate = F0
        if kind != "priced":
            rate = _number(_require(s, "rate", where), where)
            if rate < 0:
                raise DocumentError("negative-rate", where, str(rate))
        elif "rate" in s:
            raise DocumentError("unknown-field", where, "rate on a priced game")
        states.append(DocState(sid, owner, rate))

    actions = []
    aids = set()
    allowed = {"id", "from", "to", "cost"}
    if kind == "ptg":
        allowed |= {"interval", "reset"}
    for i, a in enumerate(_require(raw, "actions", "document")):
        where = f"actions[{i}]"
        _no_extras(a, allowed, where)
        aid = str(_require(a, "id", where))
        if aid in aids:
            raise DocumentError("duplicate-id", where, aid)
        aids.add(aid)
        src = str(_require(a, "from", where))
        if src not in ids:
            raise DocumentError("dangling-reference", where, f"from {src!r}")
        to = str(_require(a, "to", where))
        dest = None if to == "bot" else to
        if dest is not None and dest not in ids:
            raise DocumentError("dangling-reference", where, f"to {to!r}")
        cost = _number(_require(a, "cost", where), where, allow_inf=True)
        if not is_inf(cost) and cost < 0:
            raise DocumentError("negative-cost", where, str(cost))
        interval = None
        reset = False
        if kind == "ptg":
            iv = _require(a, "interval", where)
            _no_extras(iv, {"lo", "hi", "lo_closed", "hi_closed"}, where)
            lo = _number(_require(iv, "lo", where), where)
            hi = _number(_require(iv, "hi", where), where)
            lo_c = bool(iv.get("lo_closed", True))
            hi_c = bool(iv.get("hi_closed", True))
            if lo < 0 or lo > hi:
                raise DocumentError("bad-interval", where, f"[{lo}, {hi}]")
            interval = (lo, hi, lo_c, hi_c)
            reset = bool(a.get("reset", False))
            if reset and dest is None:
                raise DocumentError("dangling-reference", where, "reset to bot")
        actions.append(DocAction(aid, src, dest, cost, interval, reset))
    return GameDocument(kind, tuple(states), tuple(actions))


# -- serialization ----------------------------------------------------------


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def emit_game(doc: GameDocument) -> str:
    states = [
        {"id": s.id, "owner": s.owner}
        | ({} if doc.kind == "priced" else {"rate": format_cost(s.rate)})
        for s in doc.states
    ]
    actions = []
    for a in doc.actions:
        entry = {
            "id": a.id,
            "from": a.source,
            "to": "bot" if a.dest is None else a.dest,
            "cost": format_cost(a.cost),
        }
        if doc.kind == "ptg":
            lo, hi, lo_c, hi_c = a.interval
            entry["interval"] = {
                "lo": format_cost(lo),
                "hi": format_cost(hi),
                "lo_closed": lo_c,
                "hi_closed": hi_c,
            }
            entry["reset"] = a.reset
        actions.append(entry)
    return _dump(
        {"format": FORMAT_VERSION, "kind": doc.kind, "states": states, "actions": actions}
    )


def document_for(game, kind: str, state_ids=None, action_ids=None) -> GameDocument:
    """Wrap an in-memory game back into a document."""
    n = game.num_states
    state_ids = state_ids or [f"s{k}" for k in range(n)]
    action_ids = action_ids or [f"a{i}" for i in range(len(game.actions))]
    rates = game.rates if kind != "priced" else (F0,) * n
    states = tuple(
        DocState(state_ids[k], game.owners[k], rates[k]) for k in range(n)
    )
    actions = []
    for i, a in enumerate(game.actions):
        interval = None
        reset = False
        if kind == "ptg":
            interval = (a.lo, a.hi, a.lo_closed, a.hi_closed)
            reset = a.reset
        actions.append(
            DocAction(
                action_ids[i],
                state_ids[a.source],
                None if a.dest is None else state_ids[a.dest],
                a.cost,
                interval,
                reset,
            )
        )
    return GameDocument(kind, states, tuple(actions))


def _fn_segments(fn):
    rows = []
    for i, (lo, hi, val, slope) in enumerate(fn.segments()):
        row = {
            "left": format_cost(lo),
            "right": format_cost(hi),
            "value_at_left": format_cost(val),
            "slope": format_cost(F0 if is_inf(val) else slope),
        }
        pv = fn.point_vals[i]
        if pv != val and not (is_inf(pv) and is_inf(val)):
            row["left_jump"] = True
            row["point_value_at_left"] = format_cost(pv)
        rows.append(row)
    last = fn.point_vals[-1]
    end = fn.eval(fn.hi, side="left") if fn.num_segments else last
    final = {"at": format_cost(fn.hi), "value": format_cost(last)}
    if last != end and not (is_inf(last) and is_inf(end)):
        final["jump"] = True
    rows.append(final)
    return rows


def _strategy_cells(doc: GameDocument, strategy) -> list:
    cells = []
    for lo, hi, choices in strategy.cells:
        cells.append(
            {
                "left": format_cost(lo),
                "right": format_cost(hi),
                "choices": {
                    doc.states[k].id: ("wait" if j is WAIT else doc.actions[j].id)
                    for k, j in enumerate(choices)
                },
            }
        )
    return cells


def emit_priced_result(doc: GameDocument, values, approximate=False) -> str:
    body = {
        "format": FORMAT_VERSION,
        "kind": "priced",
        "values": {doc.states[k].id: format_cost(v) for k, v in enumerate(values)},
    }
    if approximate:
        body["approximate"] = True
    return _dump(body)


def emit_sptg_result(doc: GameDocument, sol: SptgSolution, approximate=False) -> str:
    body = {
        "format": FORMAT_VERSION,
        "kind": "sptg",
        "values": {
            doc.states[k].id: _fn_segments(sol.values[k])
            for k in range(len(doc.states))
        },
        "strategy": _strategy_cells(doc, sol.strategy),
        "stats": {
            "L": sol.stats.event_points,
            "sweep_steps": sol.stats.sweep_steps,
            "switch_count": sol.stats.switch_count,
            "oracle_calls": 0,
            "wall_time": "0",
        },
    }
    if approximate:
        body["approximate"] = True
    return _dump(body)


def emit_ptg_result(doc: GameDocument, res: PtgResult, approximate=False) -> str:
    interior = set()
    for f in res.values:
        interior.update(f.interior_breaks())
    body = {
        "format": FORMAT_VERSION,
        "kind": "ptg",
        "values": {
            doc.states[k].id: _fn_segments(res.values[k])
            for k in range(len(doc.states))
        },
        "jumps": {
            doc.states[k].id: [format_cost(t) for t in res.jump_points(k)]
            for k in range(len(doc.states))
        },
        "note": res.optimality_note,
        "stats": {
            "L": len(interior),
            "sweep_steps": sum(c.solution.stats.sweep_steps for c in res.trace),
            "switch_count": sum(c.solution.stats.switch_count for c in res.trace),
            "oracle_calls": res.stats.oracle_calls,
            "wall_time": "0",
        },
    }
    if approximate:
        body["approximate"] = True
    return _dump(body)


def emit_plot(doc: GameDocument, values) -> str:
    """Tab-separated segment table: state, x_left, x_right, v_left, v_right."""
    lines = ["state\tx_left\tx_right\tv_left\tv_right"]
    for k, fn in enumerate(values):
        sid = doc.states[k].id
        for lo, hi, val, slope in fn.segments():
            v_right = val if is_inf(val) else val + slope * (hi - lo)
            lines.append(
                "\t".join(
                    (sid, format_cost(lo), format_cost(hi), format_cost(val), format_cost(v_right))
                )
            )
    return "\n".join(lines) + "\n"
