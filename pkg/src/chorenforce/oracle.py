"""Trace-level checking: misbehaviour classes, conformance, overhead.

The checker is an observer. It derives everything it needs from the
choreography and the generated coordination models, then reads a trace
event by event; it never trusts a delegate's bookkeeping beyond the
reported source state of a forward. Each forwarded operation gets one
verdict:

* UndesiredTask: the operation is not available at the reported state.
* InvalidAlternative: the state sits behind a branch guard that is false.
* InvalidLoop: the state is a loop body entry whose guard is false.
* MissedLoop: the state is a loop exit although the guard says repeat.
* MissedJoin: the state follows a join the forwarding pair crossed
  without having received every required notification.
* DeadlockingJoin: issued after a stalled run, for threads still holding
  unmet join waits.

Checks are applied in that order; the first match wins. Guard verdicts
are static per (state, environment) because the environment is fixed
for a run. Notification delivery is tracked from the trace itself, so a
delegate that skips its bookkeeping cannot hide a missed join.
"""

from __future__ import annotations

from dataclasses import dataclass

from .decompose import CoordModel, Pair, generate_all
from .interpreter import Language
from .model import Choreography, Epsilon, Guard, StateKind
from .predicate import Value, eval_pred

ALLOWED = "Allowed"
UNDESIRED_TASK = "UndesiredTask"
INVALID_ALTERNATIVE = "InvalidAlternative"
INVALID_LOOP = "InvalidLoop"
MISSED_LOOP = "MissedLoop"
MISSED_JOIN = "MissedJoin"
DEADLOCKING_JOIN = "DeadlockingJoin"


@dataclass(frozen=True)
class Verdict:
    seq: int  # sequence number of the forward event; -1 for post-run findings
    kind: str
    cd: tuple[str, str]
    task: str | None
    state: str | None
    detail: str = ""


class RuntimeChecker:
    def __init__(
        self,
        model: Choreography,
        env: dict[str, Value],
        cms: dict[Pair, CoordModel] | None = None,
    ):
        self.model = model
        self.env = dict(env)
        self.cms = cms if cms is not None else generate_all(model)

        self._alt_guard_in: dict[str, object] = {}
        self._loop_guard_in: dict[str, object] = {}
        self._loop_exit_in: dict[str, str] = {}
        self._join_exit_in: dict[str, str] = {}
        self._loop_entry_guard: dict[str, object] = {}
        for flow in model.flows:
            kind = model.kind(flow.src)
            if isinstance(flow.label, Guard):
                if kind is StateKind.ALTERNATIVE:
                    self._alt_guard_in[flow.trg] = flow.label.pred
                elif kind is StateKind.LOOP:
                    self._loop_guard_in[flow.trg] = flow.label.pred
                    self._loop_entry_guard[flow.src] = flow.label.pred
            elif isinstance(flow.label, Epsilon):
                if kind is StateKind.LOOP:
                    self._loop_exit_in[flow.trg] = flow.src
                elif kind is StateKind.JOIN:
                    self._join_exit_in[flow.trg] = flow.src

    def run(self, events: list[dict]) -> list[Verdict]:
        delivered: set[tuple[str, tuple, str, tuple]] = set()
        verdicts = []
        for event in events:
            if event["kind"] == "Notify":
                delivered.add(
                    (
                        event["pred"],
                        tuple(event["from"]),
                        event["join"],
                        tuple(event["to"]),
                    )
                )
            elif event["kind"] == "Forward":
                verdicts.append(self._classify(event, delivered))
        return verdicts

    def _classify(self, event: dict, delivered: set) -> Verdict:
        cd = tuple(event["cd"])
        task = event["task"]
        src = event["src"]
        pair = Pair(*cd)

        def verdict(kind: str, detail: str = "") -> Verdict:
            return Verdict(event["seq"], kind, cd, task, src, detail)

        cm = self.cms.get(pair)
        allowed_ops = cm.ops_from(src) if cm is not None else set()
        if task not in allowed_ops:
            return verdict(
                UNDESIRED_TASK,
                f"{task!r} not among {sorted(allowed_ops)} at {src}",
            )
        if src in self._alt_guard_in:
            pred = self._alt_guard_in[src]
            if not eval_pred(pred, self.env):
                return verdict(INVALID_ALTERNATIVE, f"branch guard false at {src}")
        if src in self._loop_guard_in:
            pred = self._loop_guard_in[src]
            if not eval_pred(pred, self.env):
                return verdict(INVALID_LOOP, f"loop entry guard false at {src}")
        if src in self._loop_exit_in:
            loop_state = self._loop_exit_in[src]
            pred = self._loop_entry_guard.get(loop_state)
            if pred is not None and eval_pred(pred, self.env):
                return verdict(
                    MISSED_LOOP, f"loop at {loop_state} should repeat, not exit"
                )
        if src in self._join_exit_in:
            join = self._join_exit_in[src]
            required = self.cms[pair].waits_at(join)
            missing = [
                (pred_state, (other.initiator, other.receiver))
                for pred_state, other in sorted(required)
                if (pred_state, (other.initiator, other.receiver), join, cd)
                not in delivered
            ]
            if missing:
                return verdict(
                    MISSED_JOIN,
                    f"crossed {join} without notifications {missing}",
                )
        return verdict(ALLOWED)


def post_hoc_deadlock(delegates: dict[Pair, object]) -> list[Verdict]:
    """After a stalled run, report threads still stuck before a join."""
    findings = []
    for pair in sorted(delegates):
        delegate = delegates[pair]
        for thread in delegate.suspended_threads():
            awaited = sorted(
                (state, (p.initiator, p.receiver)) for state, p in thread.awaited
            )
            findings.append(
                Verdict(
                    -1,
                    DEADLOCKING_JOIN,
                    (pair.initiator, pair.receiver),
                    None,
                    thread.state,
                    f"thread {thread.id} awaits {awaited} before {thread.join}; "
                    f"pending requests {delegate.pending_tasks()}",
                )
            )
    return findings


def projection(events: list[dict]) -> tuple[str, ...]:
    """The run as the sequence of forwarded operation labels."""
    out = []
    for event in events:
        if event["kind"] == "Forward":
            initiator, receiver = event["cd"]
            out.append(f"{initiator}.{event['task']}.{receiver}")
    return tuple(out)


def check_conformance(events: list[dict], language: Language, completed: bool) -> bool:
    """A completed run must be a full word of the reference language; an
    interrupted one must at least be a prefix of some word."""
    word = projection(events)
    if completed:
        return language.is_member(word)
    return language.is_prefix(word)


def coordination_overhead(events: list[dict], model: Choreography) -> tuple[int, int]:
    """Delivered coordination messages versus the static bound
    |operation labels| * |roles|."""
    count = sum(1 for e in events if e["kind"] in ("Update", "Notify"))
    bound = len({op.label for op in model.operations()}) * len(model.roles)
    return count, bound


def verdict_histogram(verdicts: list[Verdict]) -> dict[str, int]:
    out: dict[str, int] = {}
    for v in verdicts:
        out[v.kind] = out.get(v.kind, 0) + 1
    return dict(sorted(out.items()))
