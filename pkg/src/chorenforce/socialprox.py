"""The social proximity network choreography, encoded by hand.

Two citizens who know each other get matched by GPS proximity and are
notified in parallel before their itineraries start. The graph below is
the running example used throughout the test suite: it exercises one
alternative pair, a fork/join, and a two-operation tail after the join.

State names follow the generated-model numbering so the golden
coordination-model fixtures stay readable.
"""

from __future__ import annotations

from .model import EPS, Choreography, Flow, Guard, Operation, StateKind
from .predicate import Not, Var

IM = "IM"
UMS = "UMS"
SPS = "SPS"
APP = "SocialProxApp"
NMU = "NMU"
NMF = "NMF"


def social_proximity() -> Choreography:
    plain = [
        "S2", "S3", "S4", "S5", "S6", "S9", "S10", "S11", "S12",
        "S14", "S15", "S19", "S20", "S21", "S22", "S23",
    ]
    states = {name: StateKind.PLAIN for name in plain}
    states["Initial"] = StateKind.INITIAL
    states["Final"] = StateKind.FINAL
    states["S7"] = StateKind.ALTERNATIVE
    states["S8"] = StateKind.ALTERNATIVE
    states["S13"] = StateKind.FORK
    states["S16"] = StateKind.JOIN

    share = Var("shareEnabled")
    friend = Var("friendFound")

    flows = [
        Flow("Initial", EPS, "S5"),
        Flow("S5", Operation(IM, "getUserPref", UMS), "S6"),
        Flow("S6", EPS, "S7"),
        Flow("S7", Guard(share), "S9"),
        Flow("S7", Guard(Not(share)), "S20"),
        Flow("S20", EPS, "Final"),
        Flow("S9", Operation(IM, "matchGPS", SPS), "S10"),
        Flow("S10", Operation(SPS, "getFriends", UMS), "S2"),
        Flow("S2", EPS, "S8"),
        Flow("S8", Guard(friend), "S3"),
        Flow("S8", Guard(Not(friend)), "S19"),
        Flow("S19", EPS, "Final"),
        Flow("S3", Operation(SPS, "getLocations", APP), "S4"),
        Flow("S4", EPS, "S13"),
        Flow("S13", EPS, "S11"),
        Flow("S13", EPS, "S14"),
        Flow("S11", Operation(SPS, "notifyFriend", NMF), "S12"),
        Flow("S14", Operation(SPS, "notifyUser", NMU), "S15"),
        Flow("S12", EPS, "S16"),
        Flow("S15", EPS, "S16"),
        Flow("S16", EPS, "S21"),
        Flow("S21", Operation(SPS, "startItin", NMF), "S22"),
        Flow("S22", Operation(SPS, "startItin", NMU), "S23"),
        Flow("S23", EPS, "Final"),
    ]

    return Choreography(
        states=states,
        initial="Initial",
        final="Final",
        roles={IM, UMS, SPS, APP, NMU, NMF},
        variables={
            "shareEnabled": (False, True),
            "friendFound": (False, True),
        },
        flows=flows,
    )


# Action lists for the scripted initiators, in choreography order.
# IM drives the opening, SPS drives everything after matchGPS.
IM_ACTIONS = [
    ("getUserPref", UMS),
    ("matchGPS", SPS),
]

SPS_ACTIONS = [
    ("getFriends", UMS),
    ("getLocations", APP),
    ("notifyFriend", NMF),
    ("notifyUser", NMU),
    ("startItin", NMF),
    ("startItin", NMU),
]

# The two notification tasks sit on parallel fork branches, so a run may
# issue them in either order. Indices refer to SPS_ACTIONS.
SPS_REORDERABLE = [[2, 3]]

ENV_BOTH_TRUE = {"shareEnabled": True, "friendFound": True}
ENV_SHARE_DISABLED = {"shareEnabled": False, "friendFound": False}
