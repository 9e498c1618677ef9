"""Single-process execution of participants, delegates and channels.

The simulator owns per-(sender, receiver) FIFO channels for updates and
notifications, while requests are handled synchronously: when the
scheduler picks a participant, the request goes to the delegate and the
reply comes back in the same step. One step therefore consumes exactly
one schedulable item: a nonempty channel, a participant with a pending
action, or an armed injection.

Every observable fact of a run becomes one trace event with a strictly
increasing sequence number. Message events are logged at delivery, so
the trace reflects what each delegate knew and when. Two runs with the
same scenario, seed and policy produce byte-identical traces.
"""

from __future__ import annotations

import random
from collections import deque

from .decompose import CoordModel, Pair
from .delegate import (
    BLOCKED,
    Delegate,
    ForwardEmission,
    NotifyEmission,
    StateChangeEmission,
    UnblockEmission,
    UpdateEmission,
)
from .model import Choreography
from .participants import Participant

COMPLETED = "completed"
DEADLOCKED = "deadlocked"
BUDGET = "budget"


class SimulationError(RuntimeError):
    pass


class AmbiguousActivationError(SimulationError):
    """More than one initially reachable entry state for a single pair."""


def enactment_bootstrap(
    model: Choreography, cms: dict[Pair, CoordModel]
) -> list[tuple[Pair, str]]:
    """The updates that start a run: for each pair, the entry states of
    its coordination model that the choreography can reach before any
    operation happened. One state activates that pair; several would
    leave the delegate unable to tell which activation is meant."""
    reachable = model.eps_closure(model.initial)
    out = []
    for pair in sorted(cms):
        candidates = sorted(cms[pair].initial_wait & reachable)
        if len(candidates) > 1:
            raise AmbiguousActivationError(
                f"{pair}: several initially reachable entry states: {candidates}"
            )
        if candidates:
            out.append((pair, candidates[0]))
    return out


class RoundRobin:
    """Rotates over every source label seen so far, in sorted order."""

    def __init__(self):
        self._known: list[str] = []
        self._known_set: set[str] = set()
        self._pos = -1

    def select(self, ready: list[str]) -> str:
        fresh = [k for k in ready if k not in self._known_set]
        if fresh:
            self._known.extend(fresh)
            self._known_set.update(fresh)
            self._known.sort()
        ready_set = set(ready)
        n = len(self._known)
        for offset in range(1, n + 1):
            idx = (self._pos + offset) % n
            if self._known[idx] in ready_set:
                self._pos = idx
                return self._known[idx]
        raise SimulationError("no ready source")


class SeededRandom:
    def __init__(self, seed: int):
        self._rng = random.Random(seed)

    def select(self, ready: list[str]) -> str:
        return self._rng.choice(ready)


def make_policy(name: str, seed: int):
    if name == "roundrobin":
        return RoundRobin()
    if name == "random":
        return SeededRandom(seed)
    raise SimulationError(f"unknown policy {name!r}")


def _fmt_pair(pair: Pair | None) -> list[str] | None:
    return None if pair is None else [pair.initiator, pair.receiver]


def _src_label(pair: Pair | None) -> str:
    return "enactment" if pair is None else f"{pair.initiator},{pair.receiver}"


class Simulator:
    def __init__(
        self,
        model: Choreography,
        cms: dict[Pair, CoordModel],
        delegates: dict[Pair, Delegate],
        participants: dict[str, Participant],
        policy,
        max_events: int = 10000,
    ):
        self.model = model
        self.cms = cms
        self.delegates = delegates
        self.participants = participants
        self.policy = policy
        self.max_events = max_events
        self.events: list[dict] = []
        self.channels: dict[tuple[Pair | None, Pair], deque] = {}
        self.request_origin: dict[int, tuple] = {}
        self._next_request = 0

    # -- trace -----------------------------------------------------------

    def _emit(self, kind: str, **fields) -> dict:
        event = {"kind": kind, "seq": len(self.events), **fields}
        self.events.append(event)
        return event

    # -- transport --------------------------------------------------------

    def _send(self, src: Pair | None, dst: Pair, message: tuple) -> None:
        self.channels.setdefault((src, dst), deque()).append(message)

    def _deliver(self, src: Pair | None, dst: Pair) -> None:
        message = self.channels[(src, dst)].popleft()
        delegate = self.delegates[dst]
        if message[0] == "update":
            _, state = message
            self._emit("Update", **{"from": _fmt_pair(src)}, to=_fmt_pair(dst), state=state)
            emissions = delegate.handle_update(state)
        else:
            _, pred, join = message
            assert src is not None
            self._emit(
                "Notify", **{"from": _fmt_pair(src)}, to=_fmt_pair(dst), pred=pred, join=join
            )
            emissions = delegate.handle_notify(pred, src, join)
        self._process(dst, emissions)

    def _process(self, origin: Pair, emissions: list) -> None:
        for em in emissions:
            if isinstance(em, ForwardEmission):
                self._emit(
                    "Forward",
                    cd=_fmt_pair(origin),
                    task=em.task,
                    src=em.src,
                    trg=em.trg,
                    receiver=origin.receiver,
                )
            elif isinstance(em, UpdateEmission):
                self._send(origin, em.dst, ("update", em.state))
            elif isinstance(em, NotifyEmission):
                self._send(origin, em.dst, ("notify", em.pred, em.join))
            elif isinstance(em, UnblockEmission):
                self._emit(
                    "Unblock",
                    cd=_fmt_pair(origin),
                    request_id=em.request_id,
                    task=em.task,
                )
                kind, *info = self.request_origin[em.request_id]
                if kind == "participant":
                    self.participants[info[0]].on_unblocked()
            elif isinstance(em, StateChangeEmission):
                self._emit(
                    "StateChange",
                    cd=_fmt_pair(origin),
                    thread=em.thread_id,
                    **{"from": em.src},
                    to=em.trg,
                )
            else:
                raise SimulationError(f"unknown emission {em!r}")

    # -- requests ----------------------------------------------------------

    def _issue(self, role: str, injection_index: int | None = None) -> None:
        participant = self.participants[role]
        if injection_index is None:
            action = participant.current_action()
        else:
            action = participant.injections[injection_index]
            participant.issued_injections.add(injection_index)
        pair = Pair(role, action.target)
        if pair not in self.delegates:
            raise SimulationError(f"no delegate for {pair}")
        request_id = self._next_request
        self._next_request += 1
        injected = injection_index is not None
        self.request_origin[request_id] = (
            ("injection", role, injection_index) if injected else ("participant", role)
        )
        self._emit(
            "Request",
            participant=role,
            cd=_fmt_pair(pair),
            task=action.task,
            request_id=request_id,
            injected=injected,
        )
        reply, emissions = self.delegates[pair].handle_request(request_id, action.task)
        self._process(pair, emissions)
        if reply == BLOCKED:
            self._emit(
                "Block",
                participant=role,
                cd=_fmt_pair(pair),
                task=action.task,
                request_id=request_id,
            )
            if not injected:
                participant.on_blocked(request_id)
        elif not injected:
            participant.on_forwarded()

    # -- main loop ------------------------------------------------------------

    def _collect_ready(self) -> dict[str, tuple]:
        ready: dict[str, tuple] = {}
        for (src, dst), queue in self.channels.items():
            if queue:
                label = f"ch:{_src_label(src)}->{_src_label(dst)}"
                ready[label] = ("channel", src, dst)
        for role in self.participants:
            participant = self.participants[role]
            if participant.ready():
                ready[f"pt:{role}"] = ("participant", role)
            for idx in participant.ready_injections():
                ready[f"inj:{role}:{idx}"] = ("injection", role, idx)
        return ready

    def bootstrap(self) -> None:
        for pair, state in enactment_bootstrap(self.model, self.cms):
            self._send(None, pair, ("update", state))

    def run(self) -> str:
        self.bootstrap()
        while True:
            if len(self.events) >= self.max_events:
                return BUDGET
            ready = self._collect_ready()
            if not ready:
                break
            label = self.policy.select(sorted(ready))
            item = ready[label]
            if item[0] == "channel":
                self._deliver(item[1], item[2])
            elif item[0] == "participant":
                self._issue(item[1])
            else:
                self._issue(item[1], injection_index=item[2])
        return COMPLETED if self._completed() else DEADLOCKED

    def _completed(self) -> bool:
        """Nothing left that must still happen. Parked threads, pairs that
        never activated, and unconsumed buffered messages are all fine;
        blocked participants, unissued injections, pending requests,
        suspended threads and threads still owed a request are not."""
        for participant in self.participants.values():
            if not participant.done():
                return False
        for pair in sorted(self.delegates):
            delegate = self.delegates[pair]
            if delegate.pending:
                return False
            for thread in delegate.threads:
                if thread.status in ("suspended", "op"):
                    return False
        return True
