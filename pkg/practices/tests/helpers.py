"""
Builders shared by the practices test modules.
"""
from pathlib import Path

from practices import scenario
from practices.models import (
    Activity, AdheredValue, Agent, Belief, ContextCue, CueKind, HabitualTrigger,
    Implementation, ImplementationType, KnowledgeBase, RelatedValue, SameLink, Value,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

COMMUTING = "Commuting 1"
CAR       = "Car Commuting 1"
KIDS      = "Bring Kids To School With Car 1"
CAR_WORK  = "Go to Work with Car 1"
NON_CAR   = "Non-Car Commuting 1"
WORK      = "Go To Work 1"
TRAIN     = "Go To Work With Train 1"
BIKE      = "Go To Work With Bike 1"


def fixture_path(name="commuting.sopra"):
    return FIXTURES / name


def load_fixture(name="commuting.sopra"):
    return scenario.load(fixture_path(name))


def make_kb(edges=(), activities=(), part_of=(), **stores):
    """
    Knowledge base from (child, parent) edges. Every id named in ``edges`` or
    ``activities`` is declared; edges whose parent is in ``part_of`` are
    partOf, the rest allOf.
    """
    ids = set(activities)
    for child, parent in edges:
        ids.update((child, parent))
    implementations = [
        Implementation(
            child, parent,
            ImplementationType.PART_OF if parent in part_of else ImplementationType.ALL_OF,
        )
        for child, parent in edges
    ]
    return KnowledgeBase.build(
        activities=[Activity(a) for a in sorted(ids)],
        implementations=implementations,
        **stores,
    )


def make_world(values=None, adherence=None, beliefs=(), triggers=(), cues=(), agents=("Ann",),
               edges=(), part_of=(), activities=(), same=()):
    """
    make_kb plus agents, values and associations given as plain tuples:
    ``values`` {(activity, value): strength}, ``adherence`` {(agent, value): strength},
    ``beliefs`` (agent, activity, personal, shared), ``triggers`` (activity, cue, strength).
    """
    values    = values or {}
    adherence = adherence or {}
    value_ids = {v for _, v in values} | {v for _, v in adherence}
    return make_kb(
        edges=edges, activities=activities, part_of=part_of,
        agents=[Agent(a) for a in agents],
        values=[Value(v) for v in sorted(value_ids)],
        context_cues=[ContextCue(c, CueKind.LOCATION) for c in cues],
        related_values=[RelatedValue(a, v, s) for (a, v), s in values.items()],
        adhered_values=[AdheredValue(g, v, s) for (g, v), s in adherence.items()],
        beliefs=[Belief(*b) for b in beliefs],
        habitual_triggers=[HabitualTrigger(*t) for t in triggers],
        same_links=[SameLink(a, b) for a, b in same],
    )
