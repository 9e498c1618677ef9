"""Shared scenario builders and run wrappers for the test suite."""

from __future__ import annotations

from chorenforce import RunResult, generate_all, reference_traces, run_scenario
from chorenforce.interpreter import Language
from chorenforce.model import EPS, Choreography, Flow, Guard, Operation, StateKind
from chorenforce.participants import Action, Injection, Scenario, ScriptSpec
from chorenforce.predicate import Not, Var
from chorenforce.socialprox import (
    ENV_BOTH_TRUE,
    ENV_SHARE_DISABLED,
    IM,
    IM_ACTIONS,
    NMF,
    NMU,
    SPS,
    SPS_ACTIONS,
    SPS_REORDERABLE,
    UMS,
    social_proximity,
)

APP = "SocialProxApp"

# Caches: the model and its decomposition never change between tests.
_MODEL = None
_CMS = None
_LANGS: dict = {}


def sp_model() -> Choreography:
    global _MODEL
    if _MODEL is None:
        _MODEL = social_proximity()
    return _MODEL


def sp_cms():
    global _CMS
    if _CMS is None:
        _CMS = generate_all(sp_model())
    return _CMS


def sp_language(env_key: str) -> Language:
    if env_key not in _LANGS:
        env = ENV_BOTH_TRUE if env_key == "both" else ENV_SHARE_DISABLED
        _LANGS[env_key] = reference_traces(sp_model(), env)
    return _LANGS[env_key]


def im_script() -> ScriptSpec:
    return ScriptSpec(role=IM, actions=tuple(Action(t, r) for t, r in IM_ACTIONS))


def sps_script(**kw) -> ScriptSpec:
    return ScriptSpec(
        role=SPS, actions=tuple(Action(t, r) for t, r in SPS_ACTIONS), **kw
    )


def inorder_scenario() -> Scenario:
    return Scenario(
        model=sp_model(),
        environment=dict(ENV_BOTH_TRUE),
        scripts=(im_script(), sps_script()),
        mode="inorder",
    )


def shuffled_scenario() -> Scenario:
    return Scenario(
        model=sp_model(),
        environment=dict(ENV_BOTH_TRUE),
        scripts=(
            im_script(),
            sps_script(reorder_groups=tuple(tuple(g) for g in SPS_REORDERABLE)),
        ),
        mode="shuffled",
    )


def adversarial_scenario() -> Scenario:
    main = (
        Action("getFriends", UMS),
        Action("getLocations", APP),
        Action("notifyUser", NMU),
        Action("notifyFriend", NMF),
        Action("startItin", NMF),
    )
    return Scenario(
        model=sp_model(),
        environment=dict(ENV_BOTH_TRUE),
        scripts=(
            im_script(),
            ScriptSpec(
                role=SPS,
                actions=main,
                injections=(Injection(after=2, task="startItin", target=NMU),),
            ),
        ),
        mode="inorder",
    )


def share_disabled_scenario() -> Scenario:
    return Scenario(
        model=sp_model(),
        environment=dict(ENV_SHARE_DISABLED),
        scripts=(ScriptSpec(role=IM, actions=(Action("getUserPref", UMS),)),),
        mode="inorder",
    )


def run_sp(scenario: Scenario, *, policy="roundrobin", seed=0, env_key="both",
            **kw) -> RunResult:
    """Run a social proximity scenario with the cached decomposition.

    Every call also asserts the coordination message bound, so any test
    going through here contributes to the overhead check.
    """
    result = run_scenario(
        scenario,
        policy=policy,
        seed=seed,
        cms=sp_cms(),
        language=sp_language(env_key),
        **kw,
    )
    assert_overhead(result)
    return result


def assert_overhead(result: RunResult) -> None:
    count, bound = result.overhead
    assert count <= bound, f"coordination overhead {count} exceeds bound {bound}"


def loop_model() -> Choreography:
    """A three-role choreography with one loop.

    A.init.B enters the loop head LP; while p holds the body runs
    A.work.B, otherwise the exit path runs A.finish.C.
    """
    p = Var("p")
    states = {
        "Initial": StateKind.INITIAL,
        "L1": StateKind.PLAIN,
        "L2": StateKind.PLAIN,
        "LP": StateKind.LOOP,
        "E1": StateKind.PLAIN,
        "E2": StateKind.PLAIN,
        "X1": StateKind.PLAIN,
        "X2": StateKind.PLAIN,
        "Final": StateKind.FINAL,
    }
    flows = [
        Flow("Initial", EPS, "L1"),
        Flow("L1", Operation("A", "init", "B"), "L2"),
        Flow("L2", EPS, "LP"),
        Flow("LP", Guard(p), "E1"),
        Flow("E1", Operation("A", "work", "B"), "E2"),
        Flow("E2", EPS, "LP"),
        Flow("LP", EPS, "X1"),
        Flow("X1", Operation("A", "finish", "C"), "X2"),
        Flow("X2", EPS, "Final"),
    ]
    return Choreography(
        states=states,
        initial="Initial",
        final="Final",
        roles={"A", "B", "C"},
        variables={"p": (False, True)},
        flows=flows,
    )


def loop_scenario(env: dict, actions: tuple[Action, ...]) -> Scenario:
    return Scenario(
        model=loop_model(),
        environment=dict(env),
        scripts=(ScriptSpec(role="A", actions=actions),),
        mode="inorder",
    )


LOOP_EXIT_ACTIONS = (Action("init", "B"), Action("finish", "C"))
LOOP_BODY_ACTIONS = (
    Action("init", "B"),
    Action("work", "B"),
    Action("work", "B"),
    Action("work", "B"),
)
