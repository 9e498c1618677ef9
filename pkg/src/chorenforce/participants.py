"""Scripted services and the scenario container that bundles a run.

A participant plays one role: it issues its actions in order, one at a
time, and does not move on until the delegate answered. A forwarded
action completes immediately; a blocked one completes when the delegate
later unblocks it. Declared reorder groups allow a seeded shuffle of
actions whose order the service genuinely does not care about.

Injections model a rogue concurrent activity inside the service: once
the main action at index `after` has completed, the injected request is
fired without waiting for an answer, while the main script carries on.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .decompose import Pair
from .model import Choreography, model_from_json, model_to_json
from .predicate import Value


class ScenarioFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Action:
    task: str
    target: str  # receiver role; the pair is (own role, target)


@dataclass(frozen=True)
class Injection:
    after: int  # index into the main action list, by completion order
    task: str
    target: str


@dataclass(frozen=True)
class ScriptSpec:
    role: str
    actions: tuple[Action, ...]
    reorder_groups: tuple[tuple[int, ...], ...] = ()
    injections: tuple[Injection, ...] = ()


def ordered_actions(spec: ScriptSpec, mode: str, seed: int) -> list[Action]:
    """Main action order for a run; 'shuffled' permutes each declared
    reorder group with a seed- and role-derived generator."""
    actions = list(spec.actions)
    if mode != "shuffled":
        return actions
    rng = random.Random(f"{seed}:{spec.role}")
    for group in spec.reorder_groups:
        picked = [actions[i] for i in group]
        shuffled = rng.sample(picked, len(picked))
        for i, action in zip(group, shuffled):
            actions[i] = action
    return actions


class Participant:
    def __init__(self, spec: ScriptSpec, mode: str = "inorder", seed: int = 0):
        self.role = spec.role
        self.actions = ordered_actions(spec, mode, seed)
        self.injections = list(spec.injections)
        self.ptr = 0
        self.blocked_request: int | None = None
        self.completed = 0
        self.issued_injections: set[int] = set()

    def ready(self) -> bool:
        return self.blocked_request is None and self.ptr < len(self.actions)

    def ready_injections(self) -> list[int]:
        return [
            i
            for i, inj in enumerate(self.injections)
            if i not in self.issued_injections and self.completed > inj.after
        ]

    def current_action(self) -> Action:
        return self.actions[self.ptr]

    def on_forwarded(self) -> None:
        self.ptr += 1
        self.completed += 1

    def on_blocked(self, request_id: int) -> None:
        self.blocked_request = request_id

    def on_unblocked(self) -> None:
        self.blocked_request = None
        self.ptr += 1
        self.completed += 1

    def done(self) -> bool:
        return (
            self.blocked_request is None
            and self.ptr >= len(self.actions)
            and len(self.issued_injections) == len(self.injections)
        )


@dataclass
class Scenario:
    model: Choreography
    environment: dict[str, Value]
    scripts: tuple[ScriptSpec, ...]
    priorities: dict[Pair, int] = field(default_factory=dict)
    mode: str = "inorder"  # or "shuffled"
    seed: int = 0
    policy: str = "roundrobin"  # or "random"


def default_priorities(pairs) -> dict[Pair, int]:
    # Later pairs in sorted order outrank earlier ones.
    return {pair: rank for rank, pair in enumerate(sorted(pairs))}


def scenario_to_json(scenario: Scenario) -> dict:
    return {
        "cefm": model_to_json(scenario.model),
        "environment": dict(sorted(scenario.environment.items())),
        "priorities": [
            [p.initiator, p.receiver, rank]
            for p, rank in sorted(scenario.priorities.items())
        ],
        "participants": [
            {
                "role": s.role,
                "actions": [[a.task, a.target] for a in s.actions],
                "reorderable": [list(g) for g in s.reorder_groups],
                "injections": [
                    {"after": inj.after, "task": inj.task, "target": inj.target}
                    for inj in s.injections
                ],
            }
            for s in scenario.scripts
        ],
        "mode": scenario.mode,
        "seed": scenario.seed,
        "policy": scenario.policy,
    }


def scenario_from_json(data: dict) -> Scenario:
    try:
        scripts = tuple(
            ScriptSpec(
                role=s["role"],
                actions=tuple(Action(task, target) for task, target in s["actions"]),
                reorder_groups=tuple(
                    tuple(g) for g in s.get("reorderable", [])
                ),
                injections=tuple(
                    Injection(inj["after"], inj["task"], inj["target"])
                    for inj in s.get("injections", [])
                ),
            )
            for s in data["participants"]
        )
        return Scenario(
            model=model_from_json(data["cefm"]),
            environment=dict(data["environment"]),
            scripts=scripts,
            priorities={
                Pair(i, r): rank for i, r, rank in data.get("priorities", [])
            },
            mode=data.get("mode", "inorder"),
            seed=data.get("seed", 0),
            policy=data.get("policy", "roundrobin"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"bad scenario document: {exc}") from exc


def dumps_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_json(scenario), indent=2, sort_keys=True) + "\n"


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        return scenario_from_json(json.load(fh))


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_scenario(scenario))
