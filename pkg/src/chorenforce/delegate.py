"""Coordination delegate: the runtime standing in front of one service pair.

A delegate owns the coordination model of a single (initiator, receiver)
pair and tracks that pair's view of the global run as a set of threads,
each pinned to one state of the model. It reacts to three inputs:

* a request from the initiator to perform a task (forwarded, or blocked
  until the global state catches up),
* a state update from another delegate (activates a fresh thread, wakes
  a blocked request, or is buffered),
* a join notification from another delegate (releases a thread waiting
  at a join, after which priority decides whether it crosses or retires).

Handlers return emissions rather than performing I/O; the caller decides
how forwards, updates, notifications and unblocks travel. That keeps the
rule logic transport-free and lets tests drive a delegate directly.

Thread statuses: 'op' means sitting at a state with an own operation
tuple, waiting for the initiator; 'suspended' means waiting before a
join; 'parked' means a local dead end where only other pairs act next.
Parked threads are normal at the end of a run. A thread that reaches the
global final state is dropped.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .decompose import CoordModel, CoordTuple, Pair
from .predicate import Value, eval_pred

FORWARDED = "forwarded"
BLOCKED = "blocked"


class CoordinationError(RuntimeError):
    pass


class UnknownTaskError(CoordinationError):
    """Request for a task that appears nowhere in the coordination model."""


class NoEnabledTupleError(CoordinationError):
    """Every tuple out of a state evaluated false under the environment."""


class DivergentWalkError(CoordinationError):
    """The epsilon walk did not settle; the model cycles without operations."""


@dataclass(frozen=True)
class ForwardEmission:
    task: str
    src: str
    trg: str | None


@dataclass(frozen=True)
class UpdateEmission:
    dst: Pair
    state: str


@dataclass(frozen=True)
class NotifyEmission:
    dst: Pair
    pred: str
    join: str


@dataclass(frozen=True)
class UnblockEmission:
    request_id: int
    task: str


@dataclass(frozen=True)
class StateChangeEmission:
    thread_id: int
    src: str | None
    trg: str


Emission = (
    ForwardEmission
    | UpdateEmission
    | NotifyEmission
    | UnblockEmission
    | StateChangeEmission
)


class Thread:
    __slots__ = ("id", "state", "status", "awaited", "join", "pending_tuple")

    def __init__(self, tid: int, state: str):
        self.id = tid
        self.state = state
        self.status = "active"
        self.awaited: set[tuple[str, Pair]] = set()
        self.join: str | None = None
        self.pending_tuple: CoordTuple | None = None

    def __repr__(self) -> str:
        return f"Thread(id={self.id}, state={self.state!r}, status={self.status!r})"


class Delegate:
    def __init__(
        self,
        pair: Pair,
        cm: CoordModel,
        env: dict[str, Value],
        priorities: dict[Pair, int],
        final_state: str | None = None,
    ):
        self.pair = pair
        self.cm = cm
        self.env = dict(env)
        self.priorities = dict(priorities)
        self.final_state = final_state
        self.threads: list[Thread] = []
        self.pending: list[tuple[int, str]] = []  # (request_id, task)
        self.update_buffer: list[str] = []
        self.notify_buffer: list[tuple[str, Pair, str]] = []
        self._next_tid = 0

    # -- hooks; faulty implementations override these -----------------------

    def _cond_holds(self, t: CoordTuple) -> bool:
        return bool(eval_pred(t.cond, self.env))

    def _notify_entries(self, t: CoordTuple):
        return t.to_be_notified

    def _wait_entries(self, t: CoordTuple):
        return t.to_be_waited

    def _winner(self, join: str, others: list[Pair]) -> bool:
        mine = self.priorities[self.pair]
        return all(mine > self.priorities[p] for p in others)

    def _forward_unchecked(self, task: str, ems: list) -> bool:
        """Last-resort forward hook. The honest delegate never forwards a
        request it cannot justify from an active thread."""
        return False

    # -- rule 1: request -----------------------------------------------------

    def handle_request(self, request_id: int, task: str) -> tuple[str, list]:
        if not self.cm.has_op(task):
            raise UnknownTaskError(f"{self.pair}: no coordination tuple for task {task!r}")
        ems: list[Emission] = []
        match = self._match_request(task)
        if match is None:
            match = self._activate_from_buffer(task, ems)
        if match is not None:
            thread, tup = match
            self._fire_op(thread, tup, ems)
            self._retry_pendings(ems)
            return FORWARDED, ems
        if self._forward_unchecked(task, ems):
            return FORWARDED, ems
        self.pending.append((request_id, task))
        return BLOCKED, ems

    def _match_request(self, task: str) -> tuple[Thread, CoordTuple] | None:
        for thread in self.threads:
            if thread.status == "suspended":
                continue
            for t in self.cm.tuples_from(thread.state):
                if t.op == task:
                    return thread, t
        return None

    def _activate_from_buffer(self, task: str, ems: list):
        # A state update can outrun the request it enables; consume it now.
        for i, state in enumerate(self.update_buffer):
            if state in self.cm.op_sources(task):
                del self.update_buffer[i]
                thread = self._spawn(state, ems)
                self._walk([thread], ems)
                return self._match_request(task)
        return None

    def _fire_op(self, thread: Thread, t: CoordTuple, ems: list) -> None:
        ems.append(ForwardEmission(task=t.op, src=t.src, trg=t.trg))
        if self._traverse(thread, t, ems):
            self._walk([thread], ems)

    # -- rule 2: state update ------------------------------------------------

    def handle_update(self, state: str) -> list:
        ems: list[Emission] = []
        if state in self.cm.initial_wait or self._pending_wants(state):
            thread = self._spawn(state, ems)
            self._walk([thread], ems)
            self._retry_pendings(ems)
            return ems
        self.update_buffer.append(state)
        return ems

    def _pending_wants(self, state: str) -> bool:
        return any(state in self.cm.op_sources(task) for _, task in self.pending)

    # -- rule 3: join notification --------------------------------------------

    def handle_notify(self, pred: str, sender: Pair, join: str) -> list:
        ems: list[Emission] = []
        for thread in self.threads:
            if (
                thread.status == "suspended"
                and thread.join == join
                and (pred, sender) in thread.awaited
            ):
                thread.awaited.discard((pred, sender))
                if not thread.awaited:
                    if self._resolve_join(thread, ems):
                        self._walk([thread], ems)
                    self._retry_pendings(ems)
                return ems
        self.notify_buffer.append((pred, sender, join))
        return ems

    # -- epsilon walk ----------------------------------------------------------

    def _walk(self, threads: list[Thread], ems: list) -> None:
        """Advance threads through epsilon tuples until each settles.

        A settled thread is at an own operation state ('op'), at a local
        dead end ('parked'), waiting before a join ('suspended'), or gone
        (final state, or lost a join). Several true conditions out of one
        state mean a concurrent split: one thread per branch.
        """
        queue = deque(threads)
        budget = 8 * (len(self.cm.tuples) + 2) ** 2
        while queue:
            thread = queue.popleft()
            if thread not in self.threads:
                continue  # retired while queued
            outs = self.cm.tuples_from(thread.state)
            if not outs:
                if thread.state == self.final_state:
                    self._retire(thread)
                else:
                    thread.status = "parked"
                continue
            if any(t.is_op for t in outs):
                thread.status = "op"
                continue
            live = [t for t in outs if self._cond_holds(t)]
            if not live:
                raise NoEnabledTupleError(
                    f"{self.pair}: no enabled tuple out of {thread.state}"
                )
            budget -= len(live)
            if budget <= 0:
                raise DivergentWalkError(
                    f"{self.pair}: walk from {thread.state} does not converge"
                )
            branches = []
            for t in live[1:]:
                child = self._spawn(thread.state, ems)
                branches.append((child, t))
            if self._traverse(thread, live[0], ems):
                queue.append(thread)
            for child, t in branches:
                if self._traverse(child, t, ems):
                    queue.append(child)

    def _traverse(self, thread: Thread, t: CoordTuple, ems: list) -> bool:
        """Apply one tuple to a thread; True when the thread advanced."""
        for pred, pair in sorted(self._notify_entries(t)):
            ems.append(NotifyEmission(dst=pair, pred=pred, join=t.trg))
        waits = set(self._wait_entries(t))
        if waits:
            thread.join = t.trg
            thread.pending_tuple = t
            thread.awaited = waits
            self._drain_notify_buffer(thread)
            if thread.awaited:
                thread.status = "suspended"
                return False
            return self._resolve_join(thread, ems)
        self._advance(thread, t, ems)
        return True

    def _advance(self, thread: Thread, t: CoordTuple, ems: list) -> None:
        for pair in sorted(t.allowed_services):
            ems.append(UpdateEmission(dst=pair, state=t.trg))
        ems.append(StateChangeEmission(thread.id, thread.state, t.trg))
        thread.state = t.trg

    def _drain_notify_buffer(self, thread: Thread) -> None:
        remaining = []
        for pred, sender, join in self.notify_buffer:
            if join == thread.join and (pred, sender) in thread.awaited:
                thread.awaited.discard((pred, sender))
            else:
                remaining.append((pred, sender, join))
        self.notify_buffer = remaining

    def _resolve_join(self, thread: Thread, ems: list) -> bool:
        """All awaited notifications arrived; cross the join or retire.

        The crossing thread is the one whose pair outranks every other
        pair named in the tuple's wait entries. Entries naming this very
        pair are sibling threads of this delegate; whichever completes
        first crosses and the rest retire when it does.
        """
        t = thread.pending_tuple
        others = sorted({p for _, p in t.to_be_waited if p != self.pair})
        if not self._winner(t.trg, others):
            self._retire(thread)
            return False
        for sibling in list(self.threads):
            if (
                sibling is not thread
                and sibling.status == "suspended"
                and sibling.join == t.trg
            ):
                self._retire(sibling)
        thread.join = None
        thread.pending_tuple = None
        thread.awaited = set()
        thread.status = "active"
        self._advance(thread, t, ems)
        return True

    # -- blocked requests -------------------------------------------------------

    def _retry_pendings(self, ems: list) -> None:
        progress = True
        while progress and self.pending:
            progress = False
            for i, (request_id, task) in enumerate(self.pending):
                match = self._match_request(task)
                if match is not None:
                    del self.pending[i]
                    ems.append(UnblockEmission(request_id=request_id, task=task))
                    self._fire_op(match[0], match[1], ems)
                    progress = True
                    break
                hook_ems: list[Emission] = []
                if self._forward_unchecked(task, hook_ems):
                    del self.pending[i]
                    ems.append(UnblockEmission(request_id=request_id, task=task))
                    ems.extend(hook_ems)
                    progress = True
                    break

    # -- bookkeeping ----------------------------------------------------------

    def _spawn(self, state: str, ems: list) -> Thread:
        thread = Thread(self._next_tid, state)
        self._next_tid += 1
        self.threads.append(thread)
        ems.append(StateChangeEmission(thread.id, None, state))
        return thread

    def _retire(self, thread: Thread) -> None:
        self.threads.remove(thread)

    def suspended_threads(self) -> list[Thread]:
        return [t for t in self.threads if t.status == "suspended"]

    def op_threads(self) -> list[Thread]:
        return [t for t in self.threads if t.status == "op"]

    def pending_tasks(self) -> list[str]:
        return [task for _, task in self.pending]
