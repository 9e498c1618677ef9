#!/usr/bin/env python3
"""Fuzz the runtime against randomly generated choreographies.

For every generated model we enumerate its reference traces, drive one
directed run per complete word, and demand agreement: equality cases must
complete with the enforced set matching the reference language exactly,
prefix cases must stay conformant without completing.
"""

from __future__ import annotations

import argparse
import random
import sys

from chorenforce import generate_all, reference_traces, run_scenario
from chorenforce.participants import Scenario, default_priorities
from chorenforce.randgen import random_case, scripts_for_word


def fuzz(models: int, seed: int, verbose: bool) -> int:
    rng = random.Random(seed)
    failures = 0
    for i in range(models):
        case = random_case(rng)
        cms = generate_all(case.model)
        priorities = default_priorities(cms)
        enforced: set[tuple[str, ...]] = set()
        bad = []
        for word in case.words:
            scenario = Scenario(
                model=case.model,
                environment=case.env,
                scripts=scripts_for_word(case.model, word),
                priorities=priorities,
            )
            result = run_scenario(
                scenario, policy="roundrobin", seed=0, cms=cms,
                language=case.language,
            )
            if result.flagged or not result.conformant:
                bad.append((word, result.outcome, [v.kind for v in result.flagged]))
            if result.outcome == "completed":
                enforced.add(result.projection)
        if case.expect == "equality" and enforced != case.language.complete:
            bad.append(("language-mismatch", sorted(enforced),
                        sorted(case.language.complete)))
        if case.expect == "prefix" and enforced:
            bad.append(("unexpected-completion", sorted(enforced), []))
        if bad:
            failures += 1
            print(f"model {i}: FAIL {bad}")
        elif verbose:
            print(f"model {i}: ok ({case.expect}, {len(case.words)} words)")
    print(f"{models - failures}/{models} models agree with the reference")
    return 0 if failures == 0 else 1


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args()
    return fuzz(args.models, args.seed, args.verbose)


if __name__ == "__main__":
    sys.exit(main())
