"""Glue that turns a scenario into a fully checked run."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .decompose import CoordModel, Pair, generate_all
from .delegate import Delegate
from .interpreter import Language, reference_traces
from .oracle import (
    ALLOWED,
    RuntimeChecker,
    Verdict,
    check_conformance,
    coordination_overhead,
    post_hoc_deadlock,
    projection,
    verdict_histogram,
)
from .participants import Participant, Scenario, default_priorities
from .simulator import COMPLETED, DEADLOCKED, Simulator, make_policy


@dataclass
class RunResult:
    outcome: str
    events: list[dict]
    verdicts: list[Verdict]
    projection: tuple[str, ...]
    conformant: bool
    overhead: tuple[int, int]
    seed: int
    policy: str
    delegates: dict[Pair, Delegate] = field(repr=False, default_factory=dict)
    participants: dict[str, Participant] = field(repr=False, default_factory=dict)

    @property
    def flagged(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.kind != ALLOWED]

    def ok(self) -> bool:
        return self.outcome == COMPLETED and not self.flagged and self.conformant

    def report(self) -> dict:
        count, bound = self.overhead
        return {
            "outcome": self.outcome,
            "policy": self.policy,
            "seed": self.seed,
            "conformant": self.conformant,
            "verdicts": verdict_histogram(self.verdicts),
            "flagged": [
                {
                    "seq": v.seq,
                    "kind": v.kind,
                    "cd": list(v.cd),
                    "task": v.task,
                    "state": v.state,
                    "detail": v.detail,
                }
                for v in self.flagged
            ],
            "events": len(self.events),
            "coordination_messages": count,
            "coordination_bound": bound,
            "projection": list(self.projection),
        }


def run_scenario(
    scenario: Scenario,
    *,
    policy: str | None = None,
    seed: int | None = None,
    max_events: int = 10000,
    mutant_pair: Pair | None = None,
    mutant_cls: type[Delegate] | None = None,
    cms: dict[Pair, CoordModel] | None = None,
    language: Language | None = None,
) -> RunResult:
    policy_name = policy if policy is not None else scenario.policy
    run_seed = seed if seed is not None else scenario.seed
    if cms is None:
        cms = generate_all(scenario.model)
    priorities = scenario.priorities or default_priorities(cms)

    delegates: dict[Pair, Delegate] = {}
    for pair in sorted(cms):
        cls = mutant_cls if (mutant_cls and pair == mutant_pair) else Delegate
        delegates[pair] = cls(
            pair, cms[pair], scenario.environment, priorities, scenario.model.final
        )
    participants = {
        spec.role: Participant(spec, mode=scenario.mode, seed=run_seed)
        for spec in scenario.scripts
    }

    sim = Simulator(
        scenario.model,
        cms,
        delegates,
        participants,
        make_policy(policy_name, run_seed),
        max_events=max_events,
    )
    outcome = sim.run()

    checker = RuntimeChecker(scenario.model, scenario.environment, cms)
    verdicts = checker.run(sim.events)
    if outcome == DEADLOCKED:
        verdicts.extend(post_hoc_deadlock(delegates))

    if language is None:
        language = reference_traces(scenario.model, scenario.environment)
    conformant = check_conformance(sim.events, language, outcome == COMPLETED)

    return RunResult(
        outcome=outcome,
        events=sim.events,
        verdicts=verdicts,
        projection=projection(sim.events),
        conformant=conformant,
        overhead=coordination_overhead(sim.events, scenario.model),
        seed=run_seed,
        policy=policy_name,
        delegates=delegates,
        participants=participants,
    )


def trace_lines(events: list[dict]) -> str:
    return "".join(json.dumps(e, sort_keys=True) + "\n" for e in events)


def write_trace(events: list[dict], path) -> None:
    with open(path, "w") as fh:
        fh.write(trace_lines(events))


def read_trace(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_report(result: RunResult, path) -> None:
    with open(path, "w") as fh:
        json.dump(result.report(), fh, indent=2, sort_keys=True)
        fh.write("\n")
