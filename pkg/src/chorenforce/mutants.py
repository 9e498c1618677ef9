"""Faulty delegate variants used to exercise the runtime checker.

Each factory returns a Delegate subclass with exactly one rule broken.
The variants that misread guards take a state-kind map because the bug
being modeled is kind-specific (a delegate that mishandles branching is
a different defect from one that mishandles loops); an honest delegate
needs no such map.
"""

from __future__ import annotations

from .delegate import Delegate, ForwardEmission
from .model import StateKind


def forward_without_check() -> type[Delegate]:
    """Forwards any known task immediately instead of blocking."""

    class ForwardWithoutCheck(Delegate):
        def _forward_unchecked(self, task, ems):
            if not self.threads:
                return False
            thread = self.threads[0]
            ems.append(ForwardEmission(task=task, src=thread.state, trg=None))
            return True

    return ForwardWithoutCheck


def _guard_inverter(kind: StateKind, state_kinds: dict[str, StateKind]) -> type[Delegate]:
    class GuardInverter(Delegate):
        def _cond_holds(self, t):
            holds = super()._cond_holds(t)
            if state_kinds.get(t.src) is kind:
                return not holds
            return holds

    return GuardInverter


def skip_guard_check(state_kinds: dict[str, StateKind]) -> type[Delegate]:
    """Takes the wrong branch at alternative states."""
    return _guard_inverter(StateKind.ALTERNATIVE, state_kinds)


def ignore_loop_guard(state_kinds: dict[str, StateKind]) -> type[Delegate]:
    """Enters loops it should skip and exits loops it should repeat."""
    return _guard_inverter(StateKind.LOOP, state_kinds)


def skip_wait() -> type[Delegate]:
    """Walks straight through joins without collecting notifications."""

    class SkipWait(Delegate):
        def _wait_entries(self, t):
            return frozenset()

    return SkipWait


def skip_notify() -> type[Delegate]:
    """Never tells the sibling branch that its own branch arrived."""

    class SkipNotify(Delegate):
        def _notify_entries(self, t):
            return frozenset()

    return SkipNotify


def wrong_priority() -> type[Delegate]:
    """Always defers at joins, as a delegate with a duplicated priority
    table entry would; nobody crosses and the run stalls."""

    class WrongPriority(Delegate):
        def _winner(self, join, others):
            return False

    return WrongPriority
