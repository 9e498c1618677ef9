"""Command line entry point."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .decompose import Pair, cm_warnings, dumps_cm, generate_all
from .interpreter import reference_traces
from .model import load_model
from .oracle import ALLOWED, RuntimeChecker, check_conformance, projection
from .participants import Scenario, load_scenario
from .randgen import random_case, scripts_for_word
from .runner import run_scenario, write_report, write_trace
from .simulator import COMPLETED, AmbiguousActivationError, enactment_bootstrap
from .validate import validate_cefm


def _cmd_validate(args) -> int:
    model = load_model(args.model)
    report = validate_cefm(model)
    print(report)
    return 0 if report.ok else 1


def _cmd_gen_cm(args) -> int:
    model = load_model(args.model)
    cms = generate_all(model)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for pair in sorted(cms):
        cm = cms[pair]
        path = out_dir / f"cm_{pair.initiator}__{pair.receiver}.json"
        path.write_text(dumps_cm(cm))
        entry = ",".join(sorted(cm.initial_wait))
        print(f"{pair}: {len(cm.tuples)} tuples, entry states {{{entry}}} -> {path}")
        for line in cm_warnings(cm):
            print(f"  warning: {line}")
    return 0


def _cmd_bootstrap(args) -> int:
    model = load_model(args.model)
    cms = generate_all(model)
    try:
        updates = enactment_bootstrap(model, cms)
    except AmbiguousActivationError as exc:
        print(f"error: {exc}")
        return 1
    for pair, state in updates:
        print(f"update {state} -> {pair}")
    if not updates:
        print("no activation needed (no operations reachable before the first one)")
    return 0


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    result = run_scenario(
        scenario,
        policy=args.policy,
        seed=args.seed,
        max_events=args.max_events,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.scenario).stem
    tag = f"{stem}_{result.policy}_{result.seed}"
    trace_path = out_dir / f"{tag}.trace.jsonl"
    report_path = out_dir / f"{tag}.report.json"
    write_trace(result.events, trace_path)
    write_report(result, report_path)
    print(f"outcome: {result.outcome}")
    print(f"forwarded: {len(result.projection)} operations")
    print(f"conformant: {result.conformant}")
    for v in result.flagged:
        print(f"flagged: {v.kind} at seq {v.seq} ({v.detail})")
    print(f"trace: {trace_path}")
    print(f"report: {report_path}")
    return 0 if result.ok() else 1


def _cmd_check_trace(args) -> int:
    scenario = load_scenario(args.scenario)
    with open(args.trace) as fh:
        events = [json.loads(line) for line in fh if line.strip()]
    checker = RuntimeChecker(scenario.model, scenario.environment)
    verdicts = checker.run(events)
    flagged = [v for v in verdicts if v.kind != ALLOWED]
    language = reference_traces(scenario.model, scenario.environment)
    word = projection(events)
    member = check_conformance(events, language, completed=True)
    prefix = check_conformance(events, language, completed=False)
    print(f"forwards: {len(word)}")
    print(f"verdicts: {len(verdicts)} checked, {len(flagged)} flagged")
    for v in flagged:
        print(f"  {v.kind} at seq {v.seq}: {v.detail}")
    print(f"complete run of the reference behaviour: {member}")
    print(f"prefix of the reference behaviour: {prefix}")
    return 0 if not flagged and prefix else 1


def _cmd_fuzz(args) -> int:
    rng = random.Random(args.seed)
    failures = 0
    for n in range(args.models):
        case = random_case(rng)
        enforced = set()
        ok = True
        for word in case.words:
            scenario_scripts = scripts_for_word(case.model, word)
            scenario = Scenario(
                model=case.model, environment=case.env, scripts=scenario_scripts
            )
            result = run_scenario(scenario, policy="roundrobin", seed=0)
            if case.expect == "equality":
                if result.outcome != COMPLETED or not result.conformant:
                    ok = False
                enforced.add(result.projection)
            else:
                if result.outcome == COMPLETED or not result.conformant:
                    ok = False
            if result.flagged:
                ok = False
        if case.expect == "equality" and enforced != case.language.complete:
            ok = False
        if not ok:
            failures += 1
            print(f"model {n}: MISMATCH ({case.expect})")
        elif args.verbose:
            print(f"model {n}: ok ({case.expect}, {len(case.words)} words)")
    print(f"{args.models - failures}/{args.models} models agree with the reference")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chorenforce",
        description="Generate, run and check pairwise coordination of choreographies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a choreography's structure")
    p.add_argument("model")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("gen-cm", help="write one coordination model per pair")
    p.add_argument("model")
    p.add_argument("--out-dir", default="cm")
    p.set_defaults(func=_cmd_gen_cm)

    p = sub.add_parser("bootstrap", help="show the activation updates for a run")
    p.add_argument("model")
    p.set_defaults(func=_cmd_bootstrap)

    p = sub.add_parser("run", help="execute a scenario and check the trace")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--policy", choices=["roundrobin", "random"], default=None)
    p.add_argument("--max-events", type=int, default=10000)
    p.add_argument("--out-dir", default="runs")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("check-trace", help="re-check a saved trace")
    p.add_argument("scenario")
    p.add_argument("trace")
    p.set_defaults(func=_cmd_check_trace)

    p = sub.add_parser("fuzz", help="compare enforcement against the reference")
    p.add_argument("--models", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=_cmd_fuzz)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
