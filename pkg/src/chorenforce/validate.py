"""Structural validation of choreography graphs.

Every rule violation is collected rather than raised, so a report lists
everything wrong with a model at once. An empty violation list means the
model is structurally sound; warnings flag suspicious but tolerated
shapes (unreachable states, states that cannot reach the final state).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Choreography, Epsilon, Flow, Guard, Operation, StateKind
from .predicate import covers_all, free_vars, satisfiable_together, to_text


@dataclass(frozen=True)
class Violation:
    state: str
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.state}: {self.rule}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, state: str, rule: str, detail: str) -> None:
        self.violations.append(Violation(state, rule, detail))

    def warn(self, state: str, rule: str, detail: str) -> None:
        self.warnings.append(Violation(state, rule, detail))

    def __str__(self) -> str:
        lines = [str(v) for v in self.violations]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) if lines else "ok"


def _is_eps(f: Flow) -> bool:
    return isinstance(f.label, Epsilon)


def _label_name(f: Flow) -> str:
    if isinstance(f.label, Epsilon):
        return "eps"
    if isinstance(f.label, Guard):
        return f"guard {to_text(f.label.pred)}"
    return f"op {f.label.label}"


def validate_cefm(model: Choreography) -> ValidationReport:
    report = ValidationReport()
    _check_degrees(model, report)
    _check_guard_placement(model, report)
    _check_guard_variables(model, report)
    _check_alternatives(model, report)
    _check_loops(model, report)
    _check_reachability(model, report)
    return report


def _check_degrees(model: Choreography, report: ValidationReport) -> None:
    for s, kind in sorted(model.states.items()):
        ins = model.in_flows(s)
        outs = model.out_flows(s)

        if kind is StateKind.INITIAL:
            if ins:
                report.add(s, "initial-degree", f"{len(ins)} incoming flows, expected 0")
            if len(outs) != 1:
                report.add(s, "initial-degree", f"{len(outs)} outgoing flows, expected 1")
            elif isinstance(outs[0].label, Guard):
                report.add(s, "initial-degree", "outgoing flow carries a guard")

        elif kind is StateKind.FINAL:
            if outs:
                report.add(s, "final-degree", f"{len(outs)} outgoing flows, expected 0")

        elif kind is StateKind.PLAIN:
            if len(ins) != 1:
                report.add(s, "plain-degree", f"{len(ins)} incoming flows, expected 1")
            if len(outs) != 1:
                report.add(s, "plain-degree", f"{len(outs)} outgoing flows, expected 1")
            elif isinstance(outs[0].label, Guard):
                report.add(s, "plain-degree", "outgoing flow carries a guard")

        elif kind is StateKind.ALTERNATIVE:
            if len(ins) != 1 or not _is_eps(ins[0]):
                report.add(s, "alternative-degree", "expected exactly one epsilon predecessor")
            guarded = [f for f in outs if isinstance(f.label, Guard)]
            if len(outs) < 2 or len(guarded) != len(outs):
                report.add(
                    s, "alternative-degree",
                    "expected at least two successors, all guarded, got "
                    + (", ".join(_label_name(f) for f in outs) or "none"),
                )

        elif kind is StateKind.FORK:
            if len(ins) != 1 or not _is_eps(ins[0]):
                report.add(s, "fork-degree", "expected exactly one epsilon predecessor")
            if len(outs) < 2 or not all(_is_eps(f) for f in outs):
                report.add(s, "fork-degree", "expected at least two epsilon successors")

        elif kind is StateKind.JOIN:
            if len(ins) < 2 or not all(_is_eps(f) for f in ins):
                report.add(s, "join-degree", "expected at least two epsilon predecessors")
            if len(outs) != 1 or not _is_eps(outs[0]):
                report.add(s, "join-degree", "expected exactly one epsilon successor")

        elif kind is StateKind.LOOP:
            if len(ins) != 2 or not all(_is_eps(f) for f in ins):
                report.add(s, "loop-degree", "expected exactly two epsilon predecessors")
            eps_out = [f for f in outs if _is_eps(f)]
            guard_out = [f for f in outs if isinstance(f.label, Guard)]
            if len(outs) != 2 or len(eps_out) != 1 or len(guard_out) != 1:
                report.add(
                    s, "loop-degree",
                    "expected one epsilon exit and one guarded entry, got "
                    + (", ".join(_label_name(f) for f in outs) or "none"),
                )


def _check_guard_placement(model: Choreography, report: ValidationReport) -> None:
    # Guards may only label branches of a decision: alternative or loop source.
    for f in model.flows:
        if isinstance(f.label, Guard):
            kind = model.kind(f.src)
            if kind not in (StateKind.ALTERNATIVE, StateKind.LOOP):
                report.add(f.src, "guard-placement",
                           f"guard flow out of a {kind.value} state")


def _check_guard_variables(model: Choreography, report: ValidationReport) -> None:
    for f in model.flows:
        if isinstance(f.label, Guard):
            missing = free_vars(f.label.pred) - set(model.variables)
            if missing:
                report.add(f.src, "guard-variables",
                           f"undeclared variables {sorted(missing)} in {to_text(f.label.pred)}")


def _guard_domains(model: Choreography, preds) -> dict | None:
    names = set()
    for p in preds:
        names |= free_vars(p)
    if names - set(model.variables):
        return None  # undeclared vars reported elsewhere; skip enumeration
    return {n: model.variables[n] for n in names}


def _check_alternatives(model: Choreography, report: ValidationReport) -> None:
    for s, kind in sorted(model.states.items()):
        if kind is not StateKind.ALTERNATIVE:
            continue
        guards = [(f, f.label.pred) for f in model.out_flows(s)
                  if isinstance(f.label, Guard)]
        if len(guards) < 2:
            continue  # degree rule already failed
        preds = [p for _, p in guards]
        domains = _guard_domains(model, preds)
        if domains is None:
            continue
        for i in range(len(preds)):
            for j in range(i + 1, len(preds)):
                witness = satisfiable_together([preds[i], preds[j]], domains)
                if witness is not None:
                    report.add(
                        s, "guards-not-exclusive",
                        f"{to_text(preds[i])} and {to_text(preds[j])} both hold at {witness}",
                    )
        uncovered = covers_all(preds, domains)
        if uncovered is not None:
            report.add(s, "guards-not-exhaustive", f"no guard holds at {uncovered}")


def _check_loops(model: Choreography, report: ValidationReport) -> None:
    for s, kind in sorted(model.states.items()):
        if kind is not StateKind.LOOP:
            continue
        guard_out = [f for f in model.out_flows(s) if isinstance(f.label, Guard)]
        if len(guard_out) != 1:
            continue  # degree rule already failed
        entry = guard_out[0].trg
        preds = [f.src for f in model.in_flows(s)]
        # One predecessor must close the cycle: reachable from the entry state.
        reachable = _forward_reach(model, entry)
        if not any(p in reachable for p in preds):
            report.add(s, "loop-back",
                       f"no predecessor of {s} is reachable from entry {entry}")


def _forward_reach(model: Choreography, start: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for f in model.out_flows(cur):
            if f.trg not in seen:
                seen.add(f.trg)
                stack.append(f.trg)
    return seen


def _check_reachability(model: Choreography, report: ValidationReport) -> None:
    from_initial = _forward_reach(model, model.initial)
    for s in sorted(model.states):
        if s not in from_initial:
            report.warn(s, "unreachable", "not reachable from the initial state")

    reaches_final = {model.final}
    changed = True
    while changed:
        changed = False
        for f in model.flows:
            if f.trg in reaches_final and f.src not in reaches_final:
                reaches_final.add(f.src)
                changed = True
    for s in sorted(model.states):
        if s not in reaches_final and s in from_initial:
            report.warn(s, "dead-end", "cannot reach the final state")
