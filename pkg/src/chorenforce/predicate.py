"""Guard predicates over finite-domain variables.

Guards label the branch flows of alternative and loop states. They are
boolean expressions in a deliberately small language:

    expr := 'true' | var | var '==' literal | 'not' expr
          | expr 'and' expr | expr 'or' expr | '(' expr ')'

Literals are integers or the keywords true/false. Bare variables must be
bound to booleans. Domains are finite, so satisfiability questions
(mutual exclusion, exhaustiveness) are settled by enumeration.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Union

Value = Union[bool, int]


class PredicateError(ValueError):
    """Malformed predicate text or evaluation failure."""


class UnboundVariableError(PredicateError):
    """A predicate referenced a variable absent from the environment."""


@dataclass(frozen=True)
class TrueLit:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Eq:
    name: str
    value: Value


@dataclass(frozen=True)
class Not:
    inner: "Pred"


@dataclass(frozen=True)
class And:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class Or:
    left: "Pred"
    right: "Pred"


Pred = Union[TrueLit, Var, Eq, Not, And, Or]

TRUE = TrueLit()

_TOKEN = re.compile(r"\s*(==|\(|\)|-?\d+|[A-Za-z_][A-Za-z0-9_]*)")
_KEYWORDS = {"true", "false", "not", "and", "or"}


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise PredicateError(f"bad character in predicate at {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise PredicateError("unexpected end of predicate")
        self.pos += 1
        return tok

    def parse(self) -> Pred:
        node = self.or_expr()
        if self.peek() is not None:
            raise PredicateError(f"trailing tokens after predicate: {self.tokens[self.pos:]}")
        return node

    def or_expr(self) -> Pred:
        node = self.and_expr()
        while self.peek() == "or":
            self.take()
            node = Or(node, self.and_expr())
        return node

    def and_expr(self) -> Pred:
        node = self.unary()
        while self.peek() == "and":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self) -> Pred:
        if self.peek() == "not":
            self.take()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Pred:
        tok = self.take()
        if tok == "(":
            node = self.or_expr()
            if self.take() != ")":
                raise PredicateError("unbalanced parenthesis")
            return node
        if tok == "true":
            return TRUE
        if tok in _KEYWORDS or tok in {"==", ")"} or re.fullmatch(r"-?\d+", tok):
            raise PredicateError(f"unexpected token {tok!r}")
        if self.peek() == "==":
            self.take()
            return Eq(tok, self._literal())
        return Var(tok)

    def _literal(self) -> Value:
        tok = self.take()
        if tok == "true":
            return True
        if tok == "false":
            return False
        if re.fullmatch(r"-?\d+", tok):
            return int(tok)
        raise PredicateError(f"expected literal after '==', got {tok!r}")


def parse_predicate(text: str) -> Pred:
    return _Parser(_tokenize(text)).parse()


def _prec(p: Pred) -> int:
    if isinstance(p, Or):
        return 1
    if isinstance(p, And):
        return 2
    if isinstance(p, Not):
        return 3
    return 4


def to_text(p: Pred) -> str:
    """Canonical text form; parse_predicate(to_text(p)) == p for any tree."""
    if isinstance(p, TrueLit):
        return "true"
    if isinstance(p, Var):
        return p.name
    if isinstance(p, Eq):
        lit = {True: "true", False: "false"}.get(p.value) if isinstance(p.value, bool) else str(p.value)
        return f"{p.name} == {lit}"
    if isinstance(p, Not):
        inner = to_text(p.inner)
        return f"not ({inner})" if _prec(p.inner) < 3 else f"not {inner}"
    if isinstance(p, (And, Or)):
        op = "and" if isinstance(p, And) else "or"
        mine = _prec(p)
        lt = to_text(p.left)
        rt = to_text(p.right)
        # left-assoc grammar: parenthesize a right child of equal precedence
        if _prec(p.left) < mine:
            lt = f"({lt})"
        if _prec(p.right) <= mine:
            rt = f"({rt})"
        return f"{lt} {op} {rt}"
    raise TypeError(f"not a predicate node: {p!r}")


def _strict_eq(a: Value, b: Value) -> bool:
    # avoid True == 1 surprises across bool/int domains
    return isinstance(a, bool) == isinstance(b, bool) and a == b


def eval_pred(p: Pred, env: dict[str, Value]) -> bool:
    if isinstance(p, TrueLit):
        return True
    if isinstance(p, Var):
        if p.name not in env:
            raise UnboundVariableError(p.name)
        val = env[p.name]
        if not isinstance(val, bool):
            raise PredicateError(f"variable {p.name!r} used as boolean but bound to {val!r}")
        return val
    if isinstance(p, Eq):
        if p.name not in env:
            raise UnboundVariableError(p.name)
        return _strict_eq(env[p.name], p.value)
    if isinstance(p, Not):
        return not eval_pred(p.inner, env)
    if isinstance(p, And):
        return eval_pred(p.left, env) and eval_pred(p.right, env)
    if isinstance(p, Or):
        return eval_pred(p.left, env) or eval_pred(p.right, env)
    raise TypeError(f"not a predicate node: {p!r}")


def free_vars(p: Pred) -> frozenset[str]:
    if isinstance(p, (Var, Eq)):
        return frozenset([p.name])
    if isinstance(p, Not):
        return free_vars(p.inner)
    if isinstance(p, (And, Or)):
        return free_vars(p.left) | free_vars(p.right)
    return frozenset()


def assignments(domains: dict[str, tuple[Value, ...]]) -> Iterator[dict[str, Value]]:
    """All total assignments over the given finite domains, in a stable order."""
    names = sorted(domains)
    for combo in itertools.product(*(domains[n] for n in names)):
        yield dict(zip(names, combo))


def satisfiable_together(preds: list[Pred], domains: dict[str, tuple[Value, ...]]) -> dict[str, Value] | None:
    """Return a witnessing assignment under which all preds hold, or None."""
    for env in assignments(domains):
        if all(eval_pred(p, env) for p in preds):
            return env
    return None


def covers_all(preds: list[Pred], domains: dict[str, tuple[Value, ...]]) -> dict[str, Value] | None:
    """Return an assignment no pred covers, or None when the disjunction is a tautology."""
    for env in assignments(domains):
        if not any(eval_pred(p, env) for p in preds):
            return env
    return None
