"""Choreography graphs: states, labeled flows, and their JSON form.

A choreography is a rooted graph. States are classified (plain,
alternative, loop, fork, join, plus one initial and one final state) and
flows carry one of three label kinds:

  * an operation  r_i.task.r_j   (initiator role, task, receiver role)
  * a guard predicate            (branch of an alternative or loop)
  * epsilon                      (pure control flow)

The JSON encoding is stable: serializing, parsing and serializing again
yields identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .predicate import Pred, Value, parse_predicate, to_text


class ModelFormatError(ValueError):
    """Raised when a choreography JSON document is structurally broken."""


class StateKind(str, Enum):
    PLAIN = "plain"
    ALTERNATIVE = "alternative"
    LOOP = "loop"
    FORK = "fork"
    JOIN = "join"
    INITIAL = "initial"
    FINAL = "final"


@dataclass(frozen=True)
class Operation:
    initiator: str
    task: str
    receiver: str

    @property
    def label(self) -> str:
        return f"{self.initiator}.{self.task}.{self.receiver}"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class Guard:
    pred: Pred


@dataclass(frozen=True)
class Epsilon:
    def __repr__(self) -> str:
        return "EPS"


EPS = Epsilon()

Label = Operation | Guard | Epsilon


@dataclass(frozen=True)
class Flow:
    src: str
    label: Label
    trg: str


def _label_sort_key(label: Label) -> tuple[int, str]:
    if isinstance(label, Epsilon):
        return (0, "")
    if isinstance(label, Guard):
        return (1, to_text(label.pred))
    return (2, label.label)


def flow_sort_key(f: Flow) -> tuple:
    return (f.src, f.trg, *_label_sort_key(f.label))


class Choreography:
    """A choreography graph plus role and variable declarations.

    Treated as immutable after construction; flow indexes are built once.
    """

    def __init__(
        self,
        states: dict[str, StateKind],
        initial: str,
        final: str,
        roles: set[str],
        variables: dict[str, tuple[Value, ...]],
        flows: list[Flow],
    ):
        self.states = dict(states)
        self.initial = initial
        self.final = final
        self.roles = set(roles)
        self.variables = {k: tuple(v) for k, v in variables.items()}
        self.flows = sorted(flows, key=flow_sort_key)
        self._out: dict[str, list[Flow]] = {s: [] for s in self.states}
        self._in: dict[str, list[Flow]] = {s: [] for s in self.states}
        for f in self.flows:
            if f.src not in self.states or f.trg not in self.states:
                raise ModelFormatError(f"flow endpoint missing from states: {f.src}->{f.trg}")
            self._out[f.src].append(f)
            self._in[f.trg].append(f)

    def out_flows(self, s: str) -> list[Flow]:
        return self._out[s]

    def in_flows(self, s: str) -> list[Flow]:
        return self._in[s]

    def kind(self, s: str) -> StateKind:
        return self.states[s]

    def operations(self) -> list[Operation]:
        seen: dict[str, Operation] = {}
        for f in self.flows:
            if isinstance(f.label, Operation):
                seen.setdefault(f.label.label, f.label)
        return [seen[k] for k in sorted(seen)]

    def pairs(self) -> list[tuple[str, str]]:
        return sorted({(op.initiator, op.receiver) for op in self.operations()})

    def eps_closure(self, start: str) -> set[str]:
        """States reachable from start via epsilon flows only (start included)."""
        seen = {start}
        stack = [start]
        while stack:
            s = stack.pop()
            for f in self._out[s]:
                if isinstance(f.label, Epsilon) and f.trg not in seen:
                    seen.add(f.trg)
                    stack.append(f.trg)
        return seen

    def echain_targets(self, s: str, label: Label) -> set[str]:
        """States reachable via one flow carrying `label`, then any epsilon chain."""
        out: set[str] = set()
        for f in self._out[s]:
            if f.label == label:
                out |= self.eps_closure(f.trg)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Choreography):
            return NotImplemented
        return (
            self.states == other.states
            and self.initial == other.initial
            and self.final == other.final
            and self.roles == other.roles
            and self.variables == other.variables
            and self.flows == other.flows
        )


def _label_to_json(label: Label):
    if isinstance(label, Epsilon):
        return "eps"
    if isinstance(label, Guard):
        return {"guard": to_text(label.pred)}
    return {"op": {"from": label.initiator, "task": label.task, "to": label.receiver}}


def _label_from_json(data) -> Label:
    if data == "eps":
        return EPS
    if isinstance(data, dict) and set(data) == {"guard"}:
        return Guard(parse_predicate(data["guard"]))
    if isinstance(data, dict) and set(data) == {"op"}:
        op = data["op"]
        if set(op) != {"from", "task", "to"}:
            raise ModelFormatError(f"bad operation label: {data!r}")
        return Operation(op["from"], op["task"], op["to"])
    raise ModelFormatError(f"unrecognized flow label: {data!r}")


def _domain_sort_key(v: Value) -> tuple[int, int]:
    return (1, int(v)) if isinstance(v, bool) else (0, v)


def model_to_json(model: Choreography) -> dict:
    return {
        "states": {s: model.states[s].value for s in sorted(model.states)},
        "initial": model.initial,
        "final": model.final,
        "roles": sorted(model.roles),
        "variables": {
            name: sorted(model.variables[name], key=_domain_sort_key)
            for name in sorted(model.variables)
        },
        "flows": [
            {"from": f.src, "to": f.trg, "label": _label_to_json(f.label)}
            for f in sorted(model.flows, key=flow_sort_key)
        ],
    }


def model_from_json(data: dict) -> Choreography:
    try:
        states = {s: StateKind(k) for s, k in data["states"].items()}
        flows = [
            Flow(f["from"], _label_from_json(f["label"]), f["to"])
            for f in data["flows"]
        ]
        model = Choreography(
            states=states,
            initial=data["initial"],
            final=data["final"],
            roles=set(data["roles"]),
            variables={k: tuple(v) for k, v in data["variables"].items()},
            flows=flows,
        )
    except KeyError as exc:
        raise ModelFormatError(f"missing field: {exc}") from exc
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc
    for name in (model.initial, model.final):
        if name not in model.states:
            raise ModelFormatError(f"initial/final state {name!r} not declared")
    return model


def dumps_model(model: Choreography) -> str:
    return json.dumps(model_to_json(model), indent=2, sort_keys=True) + "\n"


def loads_model(text: str) -> Choreography:
    return model_from_json(json.loads(text))


def save_model(model: Choreography, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_model(model))


def load_model(path) -> Choreography:
    with open(path) as fh:
        return loads_model(fh.read())
