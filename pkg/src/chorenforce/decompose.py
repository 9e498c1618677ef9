"""Decomposition of a choreography into per-pair coordination models.

Each pair of roles that exchanges at least one operation gets its own
coordination model: a set of seven-field tuples telling that pair's
delegate which operations it may forward from which state, how to walk
the epsilon/guard structure that follows its own operations, whom to
inform when the global state advances, and how to synchronize at joins.

Tuple fields, in order: source state, operation (None for an epsilon
step), target state, allowed services (pairs to send a state update to),
enabling condition, notifications to send when the target is a join,
notifications to wait for at that join.

Generation walks forward from every target of an owned operation flow,
emitting one tuple per epsilon or guard flow encountered, and stopping
where another pair's operation takes over. The epsilon flow leaving a
loop state gets the complement of the entry guard as its condition, so
exactly one of entry/exit is enabled per evaluation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .model import Choreography, Epsilon, Guard, Operation, StateKind
from .predicate import Not, Pred, TRUE, parse_predicate, to_text
from .validate import validate_cefm


class InvalidModelError(ValueError):
    """The source model failed structural validation."""


class CmFormatError(ValueError):
    """A coordination-model JSON document is malformed."""


@dataclass(frozen=True, order=True)
class Pair:
    initiator: str
    receiver: str

    def __str__(self) -> str:
        return f"({self.initiator},{self.receiver})"


@dataclass(frozen=True)
class CoordTuple:
    src: str
    op: str | None  # task name; None for an epsilon step
    trg: str
    allowed_services: frozenset[Pair]
    cond: Pred
    to_be_notified: frozenset[tuple[str, Pair]]
    to_be_waited: frozenset[tuple[str, Pair]]

    @property
    def is_op(self) -> bool:
        return self.op is not None

    def sort_key(self) -> tuple:
        return (self.src, self.op or "", self.trg, to_text(self.cond))

    def __str__(self) -> str:
        op = f"{self.op}()" if self.op else "eps"
        allowed = "{" + ",".join(str(p) for p in sorted(self.allowed_services)) + "}"
        return f"<{self.src}, {op}, {self.trg}, {allowed}, {to_text(self.cond)}>"


class CoordModel:
    def __init__(self, owner: Pair, tuples):
        self.owner = owner
        self.tuples = frozenset(tuples)

    def sorted_tuples(self) -> list[CoordTuple]:
        return sorted(self.tuples, key=CoordTuple.sort_key)

    @cached_property
    def by_src(self) -> dict[str, list[CoordTuple]]:
        out: dict[str, list[CoordTuple]] = {}
        for t in self.sorted_tuples():
            out.setdefault(t.src, []).append(t)
        return out

    def tuples_from(self, src: str) -> list[CoordTuple]:
        return self.by_src.get(src, [])

    def ops_from(self, src: str) -> set[str]:
        return {t.op for t in self.tuples_from(src) if t.is_op}

    def has_op(self, task: str) -> bool:
        return any(t.op == task for t in self.tuples)

    def op_sources(self, task: str) -> list[str]:
        return sorted(t.src for t in self.tuples if t.op == task)

    @cached_property
    def initial_wait(self) -> frozenset[str]:
        return initial_wait_states(self)

    def waits_at(self, join: str) -> frozenset[tuple[str, Pair]]:
        """All notifications this delegate must collect before passing `join`."""
        out: set[tuple[str, Pair]] = set()
        for t in self.tuples:
            if t.trg == join:
                out |= t.to_be_waited
        return frozenset(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoordModel):
            return NotImplemented
        return self.owner == other.owner and self.tuples == other.tuples


def _operation_pairs(model: Choreography) -> list[Pair]:
    return [Pair(i, r) for i, r in model.pairs()]


def _owners_of(model: Choreography) -> dict[str, frozenset[Pair]]:
    """For each state, the pairs whose operation chain reaches it.

    A pair (h,k) owns state x when some flow labeled r_h.t.r_k leads to a
    state whose epsilon closure contains x.
    """
    owners: dict[str, set[Pair]] = {s: set() for s in model.states}
    for f in model.flows:
        if isinstance(f.label, Operation):
            pair = Pair(f.label.initiator, f.label.receiver)
            for s in model.eps_closure(f.trg):
                owners[s].add(pair)
    return {s: frozenset(v) for s, v in owners.items()}


def _allowed_services(model: Choreography, owner: Pair, trg: str) -> frozenset[Pair]:
    # Only pairs whose operation leaves trg directly; the owner never
    # updates itself.
    out = set()
    for f in model.out_flows(trg):
        if isinstance(f.label, Operation):
            pair = Pair(f.label.initiator, f.label.receiver)
            if pair != owner:
                out.add(pair)
    return frozenset(out)


def _join_entries(
    model: Choreography,
    owners: dict[str, frozenset[Pair]],
    src: str,
    trg: str,
) -> tuple[frozenset, frozenset]:
    """Notify/wait sets for a tuple src -> trg; empty unless trg is a join."""
    if model.kind(trg) is not StateKind.JOIN:
        return frozenset(), frozenset()
    notified = set()
    waited = set()
    for f in model.in_flows(trg):
        sibling = f.src
        if sibling == src:
            continue
        for pair in owners[sibling]:
            notified.add((src, pair))
            waited.add((sibling, pair))
    return frozenset(notified), frozenset(waited)


def _loop_exit_cond(model: Choreography, src: str) -> Pred:
    # The exit epsilon of a loop fires exactly when the entry guard fails.
    entry = [f for f in model.out_flows(src) if isinstance(f.label, Guard)]
    if len(entry) != 1:
        return TRUE
    pred = entry[0].label.pred
    return pred.inner if isinstance(pred, Not) else Not(pred)


def _generate(model: Choreography, owner: Pair,
              owners: dict[str, frozenset[Pair]]) -> CoordModel:
    tuples: set[CoordTuple] = set()
    frontier: list[str] = []

    for f in model.flows:
        if isinstance(f.label, Operation) and Pair(f.label.initiator, f.label.receiver) == owner:
            notified, waited = _join_entries(model, owners, f.src, f.trg)
            tuples.add(CoordTuple(
                src=f.src, op=f.label.task, trg=f.trg,
                allowed_services=_allowed_services(model, owner, f.trg),
                cond=TRUE, to_be_notified=notified, to_be_waited=waited,
            ))
            frontier.append(f.trg)

    seen: set[str] = set()
    while frontier:
        s = frontier.pop()
        if s in seen:
            continue
        seen.add(s)
        for f in model.out_flows(s):
            if isinstance(f.label, Operation):
                continue  # another pair's move; this walk stops here
            if isinstance(f.label, Guard):
                cond = f.label.pred
            elif model.kind(s) is StateKind.LOOP:
                cond = _loop_exit_cond(model, s)
            else:
                cond = TRUE
            notified, waited = _join_entries(model, owners, s, f.trg)
            tuples.add(CoordTuple(
                src=s, op=None, trg=f.trg,
                allowed_services=_allowed_services(model, owner, f.trg),
                cond=cond, to_be_notified=notified, to_be_waited=waited,
            ))
            frontier.append(f.trg)

    return CoordModel(owner, tuples)


def generate_cm(model: Choreography, owner: Pair) -> CoordModel:
    report = validate_cefm(model)
    if not report.ok:
        raise InvalidModelError(str(report))
    if owner not in _operation_pairs(model):
        raise InvalidModelError(f"{owner} exchanges no operation in the model")
    return _generate(model, owner, _owners_of(model))


def generate_all(model: Choreography) -> dict[Pair, CoordModel]:
    report = validate_cefm(model)
    if not report.ok:
        raise InvalidModelError(str(report))
    owners = _owners_of(model)
    return {p: _generate(model, p, owners) for p in _operation_pairs(model)}


def initial_wait_states(cm: CoordModel) -> frozenset[str]:
    """States at which a fresh activation of this delegate can begin.

    These are sources of operation tuples that the delegate cannot reach
    on its own: the forward walk over its tuples stops at join entries,
    because crossing a join is decided by the notify/priority handshake
    and continued via an update, not by this walk.
    """
    op_sources = {t.src for t in cm.tuples if t.is_op}
    reached: set[str] = set()
    frontier = [t.trg for t in cm.tuples if t.is_op and not t.to_be_waited]
    while frontier:
        s = frontier.pop()
        if s in reached:
            continue
        reached.add(s)
        for t in cm.tuples_from(s):
            if t.to_be_waited:
                continue
            frontier.append(t.trg)
    return frozenset(op_sources - reached)


def cm_warnings(cm: CoordModel) -> list[str]:
    """Ambiguities the runtime rules cannot resolve deterministically."""
    out = []
    joins = {t.trg for t in cm.tuples if t.to_be_waited}
    for j in sorted(joins):
        exits = cm.tuples_from(j)
        if len(exits) > 1:
            out.append(f"{cm.owner}: join {j} has {len(exits)} outgoing tuples")
    return out


def _pair_to_json(p: Pair) -> list[str]:
    return [p.initiator, p.receiver]


def _pair_from_json(data) -> Pair:
    if not (isinstance(data, list) and len(data) == 2):
        raise CmFormatError(f"bad pair: {data!r}")
    return Pair(data[0], data[1])


def _entry_set_to_json(entries) -> list:
    return [[s, _pair_to_json(p)] for s, p in sorted(entries)]


def _entry_set_from_json(data) -> frozenset:
    return frozenset((s, _pair_from_json(p)) for s, p in data)


def tuple_to_json(t: CoordTuple) -> dict:
    return {
        "src": t.src,
        "op": t.op,
        "trg": t.trg,
        "allowedService": [_pair_to_json(p) for p in sorted(t.allowed_services)],
        "cond": to_text(t.cond),
        "toBeNotified": _entry_set_to_json(t.to_be_notified),
        "toBeWaited": _entry_set_to_json(t.to_be_waited),
    }


def tuple_from_json(data: dict) -> CoordTuple:
    try:
        return CoordTuple(
            src=data["src"],
            op=data["op"],
            trg=data["trg"],
            allowed_services=frozenset(_pair_from_json(p) for p in data["allowedService"]),
            cond=parse_predicate(data["cond"]),
            to_be_notified=_entry_set_from_json(data["toBeNotified"]),
            to_be_waited=_entry_set_from_json(data["toBeWaited"]),
        )
    except KeyError as exc:
        raise CmFormatError(f"missing tuple field: {exc}") from exc


def dumps_cm(cm: CoordModel) -> str:
    """Canonical dump: a JSON array of tuples ordered by (src, op, trg)."""
    body = [tuple_to_json(t) for t in cm.sorted_tuples()]
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def loads_cm(text: str, owner: Pair) -> CoordModel:
    data = json.loads(text)
    if not isinstance(data, list):
        raise CmFormatError("expected a JSON array of tuples")
    return CoordModel(owner, (tuple_from_json(t) for t in data))
