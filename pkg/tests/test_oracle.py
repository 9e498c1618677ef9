"""Misbehaviour classification, conformance and overhead checks.

Each faulty delegate gets the smallest scenario that makes its defect
observable; the expected class is asserted on the exact forward (or, for
the silent-deadlock case, on the post-run findings).
"""

from chorenforce.decompose import Pair
from chorenforce.mutants import (
    forward_without_check,
    ignore_loop_guard,
    skip_guard_check,
    skip_notify,
    skip_wait,
    wrong_priority,
)
from chorenforce.oracle import (
    ALLOWED,
    DEADLOCKING_JOIN,
    INVALID_ALTERNATIVE,
    INVALID_LOOP,
    MISSED_JOIN,
    MISSED_LOOP,
    UNDESIRED_TASK,
    RuntimeChecker,
    check_conformance,
    coordination_overhead,
    projection,
    verdict_histogram,
)
from chorenforce.participants import Action, Scenario, ScriptSpec
from chorenforce.runner import run_scenario
from chorenforce.simulator import COMPLETED, DEADLOCKED
from chorenforce.socialprox import (
    ENV_BOTH_TRUE,
    ENV_SHARE_DISABLED,
    IM,
    NMF,
    NMU,
    SPS,
    UMS,
)
from helpers import (
    APP,
    sp_cms,
    sp_language,
    sp_model,
    im_script,
    inorder_scenario,
    loop_model,
    loop_scenario,
    run_sp,
    LOOP_EXIT_ACTIONS,
)

SPS_NMU = Pair(SPS, NMU)
SPS_NMF = Pair(SPS, NMF)
IM_UMS = Pair(IM, UMS)


def kinds_of(result):
    return [v.kind for v in result.verdicts]


def test_honest_run_all_allowed():
    result = run_sp(inorder_scenario())
    assert result.outcome == COMPLETED
    assert set(kinds_of(result)) == {ALLOWED}
    assert result.conformant
    assert verdict_histogram(result.verdicts) == {ALLOWED: 8}


def test_checker_recomputes_from_model_alone():
    result = run_sp(inorder_scenario())
    checker = RuntimeChecker(sp_model(), dict(ENV_BOTH_TRUE))
    assert checker.run(result.events) == result.verdicts


def test_forward_without_check_is_undesired_task():
    scenario = Scenario(
        model=sp_model(),
        environment=dict(ENV_BOTH_TRUE),
        scripts=(
            im_script(),
            ScriptSpec(role=SPS, actions=(
                Action("getFriends", UMS),
                Action("getLocations", APP),
                Action("startItin", NMU),
            )),
        ),
    )
    result = run_scenario(
        scenario, cms=sp_cms(),
        mutant_pair=SPS_NMU, mutant_cls=forward_without_check(),
    )
    bad = [v for v in result.verdicts if v.kind == UNDESIRED_TASK]
    assert len(bad) == 1
    assert bad[0].task == "startItin" and bad[0].state == "S14"
    assert result.outcome == DEADLOCKED
    assert not result.conformant


def test_skip_guard_check_is_invalid_alternative():
    scenario = Scenario(
        model=sp_model(),
        environment=dict(ENV_SHARE_DISABLED),
        scripts=(im_script(),),
    )
    result = run_scenario(
        scenario, cms=sp_cms(),
        mutant_pair=IM_UMS,
        mutant_cls=skip_guard_check(sp_model().states),
    )
    bad = [v for v in result.verdicts if v.kind == INVALID_ALTERNATIVE]
    assert len(bad) == 1
    assert bad[0].task == "matchGPS" and bad[0].state == "S9"
    assert not result.conformant


def test_ignore_loop_guard_is_invalid_loop():
    scenario = loop_scenario(
        {"p": False}, (Action("init", "B"), Action("work", "B"))
    )
    result = run_scenario(
        scenario,
        mutant_pair=Pair("A", "B"),
        mutant_cls=ignore_loop_guard(loop_model().states),
    )
    bad = [v for v in result.verdicts if v.kind == INVALID_LOOP]
    assert len(bad) == 1
    assert bad[0].task == "work" and bad[0].state == "E1"


def test_ignore_loop_guard_is_missed_loop_when_it_should_repeat():
    scenario = loop_scenario({"p": True}, LOOP_EXIT_ACTIONS)
    result = run_scenario(
        scenario,
        mutant_pair=Pair("A", "B"),
        mutant_cls=ignore_loop_guard(loop_model().states),
    )
    bad = [v for v in result.verdicts if v.kind == MISSED_LOOP]
    assert len(bad) == 1
    assert bad[0].task == "finish" and bad[0].state == "X1"
    # the run even completes: only the verdict reveals the defect
    assert result.outcome == COMPLETED
    assert not result.conformant


def test_skip_wait_is_missed_join():
    scenario = Scenario(
        model=sp_model(),
        environment=dict(ENV_BOTH_TRUE),
        scripts=(
            im_script(),
            ScriptSpec(role=SPS, actions=(
                Action("getFriends", UMS),
                Action("getLocations", APP),
                Action("notifyFriend", NMF),
                Action("startItin", NMF),
            )),
        ),
    )
    result = run_scenario(
        scenario, cms=sp_cms(),
        mutant_pair=SPS_NMF, mutant_cls=skip_wait(),
    )
    bad = [v for v in result.verdicts if v.kind == MISSED_JOIN]
    assert len(bad) == 1
    assert bad[0].task == "startItin" and bad[0].state == "S21"
    assert result.outcome == DEADLOCKED


def test_skip_notify_deadlocks_the_join():
    result = run_sp(
        inorder_scenario(), mutant_pair=SPS_NMF, mutant_cls=skip_notify()
    )
    assert result.outcome == DEADLOCKED
    findings = [v for v in result.verdicts if v.kind == DEADLOCKING_JOIN]
    assert len(findings) == 1
    assert findings[0].cd == (SPS, NMU)
    assert findings[0].state == "S15"
    assert findings[0].seq == -1
    # every forwarded operation was individually fine
    forwards = [v for v in result.verdicts if v.seq >= 0]
    assert set(v.kind for v in forwards) == {ALLOWED}
    assert result.conformant  # a prefix: the run was cut short, not corrupted


def test_wrong_priority_stalls_without_a_finding():
    result = run_sp(
        inorder_scenario(), mutant_pair=SPS_NMU, mutant_cls=wrong_priority()
    )
    assert result.outcome == DEADLOCKED
    # both sides retire their join threads, so nothing is left suspended:
    # the defect shows up as the outcome, not as a classified forward
    assert not result.flagged
    assert result.conformant


def test_projection_matches_forward_events():
    result = run_sp(inorder_scenario())
    assert projection(result.events) == result.projection
    assert result.projection[0] == "IM.getUserPref.UMS"


def test_conformance_prefix_vs_member():
    result = run_sp(inorder_scenario())
    lang = sp_language("both")
    assert check_conformance(result.events, lang, completed=True)
    # the same trace as an interrupted run is still a prefix
    assert check_conformance(result.events, lang, completed=False)
    # chopping the trace breaks membership but not prefixhood
    without_last = [
        e for e in result.events
        if not (e["kind"] == "Forward" and e["task"] == "startItin"
                and e["cd"] == [SPS, NMU])
    ]
    assert not check_conformance(without_last, lang, completed=True)
    assert check_conformance(without_last, lang, completed=False)


def test_overhead_within_bound():
    result = run_sp(inorder_scenario())
    count, bound = coordination_overhead(result.events, sp_model())
    assert (count, bound) == result.overhead
    assert count == 10
    assert bound == 48  # 8 operation labels, 6 roles
    assert count <= bound
