"""Brute-force reference semantics for choreography graphs.

Runs the token game directly on the model: forks duplicate tokens, joins
wait for a token on every incoming flow, alternatives and loops follow
the guard valuation. Every interleaving of enabled operations is
explored, so the resulting sequence set is the exact trace language of
the model under one fixed environment. Loop bodies make the language
infinite; `max_ops` truncates and the truncation is reported instead of
silently dropped.

This module is deliberately independent from the coordination-model
machinery: it is the oracle the enforced runtime is checked against.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .model import Choreography, Epsilon, Guard, Operation, StateKind
from .predicate import Value, eval_pred


class InterpreterError(RuntimeError):
    pass


class NoTrueGuardError(InterpreterError):
    """No outgoing guard of an alternative state holds under the environment."""


class StuckTokenError(InterpreterError):
    """Tokens remain but nothing can move: ill-synchronized model."""


@dataclass(frozen=True)
class Language:
    """Operation-sequence language of a model under one environment."""

    complete: frozenset
    truncated: frozenset

    @property
    def was_truncated(self) -> bool:
        return bool(self.truncated)

    def is_member(self, seq) -> bool:
        return tuple(seq) in self.complete

    def is_prefix(self, seq) -> bool:
        seq = tuple(seq)
        for ref in self.complete | self.truncated:
            if ref[: len(seq)] == seq:
                return True
        return False


# A configuration is (tokens, arrived):
#   tokens:  state -> token count
#   arrived: (predecessor, join) -> tokens parked on that join entry edge
_Config = tuple[tuple, tuple]


def _freeze(tokens: Counter, arrived: Counter) -> _Config:
    return (
        tuple(sorted((s, n) for s, n in tokens.items() if n)),
        tuple(sorted((e, n) for e, n in arrived.items() if n)),
    )


def _thaw(config: _Config) -> tuple[Counter, Counter]:
    return Counter(dict(config[0])), Counter(dict(config[1]))


def _move_token(model: Choreography, tokens: Counter, arrived: Counter,
                src: str, trg: str) -> None:
    tokens[src] -= 1
    if model.kind(trg) is StateKind.JOIN:
        arrived[(src, trg)] += 1
    else:
        tokens[trg] += 1


def _fire_ready_joins(model: Choreography, tokens: Counter, arrived: Counter) -> bool:
    fired = False
    joins = sorted({j for (_, j), n in arrived.items() if n})
    for j in joins:
        edges = [(f.src, j) for f in model.in_flows(j)]
        while all(arrived[e] for e in edges):
            for e in edges:
                arrived[e] -= 1
            tokens[j] += 1
            fired = True
    return fired


def _normalize(model: Choreography, config: _Config, env: dict[str, Value]) -> _Config:
    """Run all epsilon moves to quiescence; stop tokens at operation sources."""
    tokens, arrived = _thaw(config)
    budget = 16 * (len(model.states) + 2) * (len(model.flows) + 2) * (
        sum(tokens.values()) + sum(arrived.values()) + 2
    )
    progress = True
    while progress:
        progress = _fire_ready_joins(model, tokens, arrived)
        for s in sorted(tokens):
            if not tokens[s]:
                continue
            kind = model.kind(s)
            outs = model.out_flows(s)
            if kind is StateKind.FINAL:
                tokens[s] = 0
                progress = True
            elif kind is StateKind.FORK:
                for _ in range(tokens[s]):
                    tokens[s] -= 1
                    for f in outs:
                        if model.kind(f.trg) is StateKind.JOIN:
                            arrived[(s, f.trg)] += 1
                        else:
                            tokens[f.trg] += 1
                progress = True
            elif kind in (StateKind.ALTERNATIVE, StateKind.LOOP):
                chosen = None
                eps_exit = None
                for f in outs:
                    if isinstance(f.label, Guard):
                        if eval_pred(f.label.pred, env):
                            chosen = f.trg
                    elif isinstance(f.label, Epsilon):
                        eps_exit = f.trg
                if chosen is None:
                    chosen = eps_exit  # loop exit; alternatives have no eps flow
                if chosen is None:
                    raise NoTrueGuardError(f"no guard holds at {s} under {env}")
                while tokens[s]:
                    _move_token(model, tokens, arrived, s, chosen)
                progress = True
            else:
                # plain, initial, join: a single outgoing flow
                if outs and isinstance(outs[0].label, Epsilon):
                    while tokens[s]:
                        _move_token(model, tokens, arrived, s, outs[0].trg)
                    progress = True
            budget -= 1
            if budget < 0:
                raise InterpreterError("epsilon moves do not converge (epsilon cycle?)")
    return _freeze(tokens, arrived)


def _enabled_ops(model: Choreography, config: _Config) -> list[tuple[str, Operation, str]]:
    out = []
    for s, n in config[0]:
        if not n:
            continue
        for f in model.out_flows(s):
            if isinstance(f.label, Operation):
                out.append((s, f.label, f.trg))
    return sorted(out, key=lambda e: (e[0], e[1].label, e[2]))


def reference_traces(model: Choreography, env: dict[str, Value],
                     max_ops: int = 50) -> Language:
    """All operation-label sequences of complete runs, plus truncated prefixes."""
    start = _normalize(model, _freeze(Counter({model.initial: 1}), Counter()), env)
    complete: set = set()
    truncated: set = set()
    seen: set = set()

    def walk(config: _Config, seq: tuple) -> None:
        if (config, seq) in seen:
            return
        seen.add((config, seq))
        ops = _enabled_ops(model, config)
        if not ops:
            if config[0] or config[1]:
                raise StuckTokenError(
                    f"tokens stuck at {config} after {list(seq)}")
            complete.add(seq)
            return
        if len(seq) >= max_ops:
            truncated.add(seq)
            return
        for s, op, trg in ops:
            tokens, arrived = _thaw(config)
            _move_token(model, tokens, arrived, s, trg)
            nxt = _normalize(model, _freeze(tokens, arrived), env)
            walk(nxt, seq + (op.label,))

    walk(start, ())
    return Language(complete=frozenset(complete), truncated=frozenset(truncated))
