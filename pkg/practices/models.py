"""
practices/models.py

Domain types of a social-practice world and the in-memory KnowledgeBase
that aggregates them. Nothing here is stored in a database: the enums reuse
Django's TextChoices, every record is a frozen dataclass keyed by string ids.
"""
from collections import defaultdict
from dataclasses import dataclass, field, fields
from types import MappingProxyType

from django.db import models

from .exceptions import PreconditionError, UnknownReference


# ──────────────────────────────────────────
# CHOICES
# ──────────────────────────────────────────
class ActivityType(models.TextChoices):
    ACTION          = "Action",         "Action"
    ABSTRACT_ACTION = "AbstractAction", "Abstract action"
    TOP_ACTION      = "TopAction",      "Top action"


class ImplementationType(models.TextChoices):
    ALL_OF  = "allOf",  "All of (a way of doing the parent)"
    PART_OF = "partOf", "Part of (needed to complete the parent)"


class CueKind(models.TextChoices):
    OBJECT   = "object",   "Object"
    LOCATION = "location", "Location"
    AGENT    = "agent",    "Agent"
    ACTIVITY = "activity", "Activity"


class Provenance(models.TextChoices):
    ASSERTED = "asserted", "Asserted"
    INFERRED = "inferred", "Inferred"


# ──────────────────────────────────────────
# ENTITIES
# ──────────────────────────────────────────
@dataclass(frozen=True)
class Activity:
    """
    One view on a bodily movement. ``asserted_type`` is whatever the input
    file claimed; the authoritative type is derived from the tree position
    by ``validators.classify_types``.
    """
    id:            str
    label:         str = ""
    asserted_type: str | None = None

    def __post_init__(self):
        if not self.label:
            object.__setattr__(self, "label", self.id)

    @property
    def key(self):
        return self.id


@dataclass(frozen=True)
class Agent:
    id:        str
    # Stored and round-tripped only; habit learning is not modelled.
    habit_rate: float = 0.0

    @property
    def key(self):
        return self.id


@dataclass(frozen=True)
class ContextCue:
    id:   str
    kind: str = CueKind.OBJECT

    @property
    def key(self):
        return self.id


@dataclass(frozen=True)
class Value:
    id:    str
    label: str = ""

    def __post_init__(self):
        if not self.label:
            object.__setattr__(self, "label", self.id)

    @property
    def key(self):
        return self.id


# ──────────────────────────────────────────
# ASSOCIATIONS
# ──────────────────────────────────────────
@dataclass(frozen=True)
class Implementation:
    child:     str
    parent:    str
    impl_type: str = ImplementationType.ALL_OF

    @property
    def key(self):
        return (self.child, self.parent)


@dataclass(frozen=True)
class Belief:
    """personal_strength and shared_strength are independent of each other."""
    agent:             str
    activity:          str
    personal_strength: float
    shared_strength:   float

    @property
    def key(self):
        return (self.agent, self.activity)


@dataclass(frozen=True)
class HabitualTrigger:
    activity: str
    cue:      str
    strength: float

    @property
    def key(self):
        return (self.activity, self.cue)


@dataclass(frozen=True)
class RelatedValue:
    activity:   str
    value:      str
    strength:   float
    provenance: str = Provenance.ASSERTED

    @property
    def key(self):
        return (self.activity, self.value, self.provenance)


@dataclass(frozen=True)
class AdheredValue:
    agent:    str
    value:    str
    strength: float

    @property
    def key(self):
        return (self.agent, self.value)


@dataclass(frozen=True)
class SameLink:
    """Unordered pair; stored with the smaller id first."""
    a: str
    b: str

    def __post_init__(self):
        if self.b < self.a:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def key(self):
        return (self.a, self.b)


# ──────────────────────────────────────────
# KNOWLEDGE BASE
# ──────────────────────────────────────────
ENTITY_STORES = ("activities", "agents", "context_cues", "values")

@dataclass(frozen=True, eq=False)
class KnowledgeBase:
    """
    The complete loaded world: entity stores plus association stores, each a
    read-only mapping from record key to record.

    Construct with ``KnowledgeBase.build(...)`` from plain record iterables.
    The instance is never mutated afterwards; editing a world means building
    a new one.
    """
    activities:        dict = field(default_factory=dict)
    implementations:   dict = field(default_factory=dict)
    agents:            dict = field(default_factory=dict)
    context_cues:      dict = field(default_factory=dict)
    values:            dict = field(default_factory=dict)
    beliefs:           dict = field(default_factory=dict)
    habitual_triggers: dict = field(default_factory=dict)
    related_values:    dict = field(default_factory=dict)
    adhered_values:    dict = field(default_factory=dict)
    same_links:        dict = field(default_factory=dict)

    def __post_init__(self):
        for store in fields(self):
            frozen = MappingProxyType(dict(getattr(self, store.name)))
            object.__setattr__(self, store.name, frozen)

        children = defaultdict(set)
        parents  = defaultdict(set)
        for impl in self.implementations.values():
            # Edges with an undeclared end are left to the REF check.
            if impl.child not in self.activities or impl.parent not in self.activities:
                continue
            children[impl.parent].add(impl.child)
            parents[impl.child].add(impl.parent)

        beliefs_by_agent = defaultdict(list)
        for belief in self.beliefs.values():
            beliefs_by_agent[belief.agent].append(belief)

        triggers_by_activity = defaultdict(list)
        for trigger in self.habitual_triggers.values():
            triggers_by_activity[trigger.activity].append(trigger)

        adherence_by_agent = defaultdict(list)
        for adhered in self.adhered_values.values():
            adherence_by_agent[adhered.agent].append(adhered)

        object.__setattr__(self, "_children", {p: frozenset(c) for p, c in children.items()})
        object.__setattr__(self, "_parents", {c: tuple(sorted(p)) for c, p in parents.items()})
        object.__setattr__(self, "_beliefs_by_agent", dict(beliefs_by_agent))
        object.__setattr__(self, "_triggers_by_activity", dict(triggers_by_activity))
        object.__setattr__(self, "_adherence_by_agent", dict(adherence_by_agent))

    @classmethod
    def build(cls, *, activities=(), implementations=(), agents=(), context_cues=(),
              values=(), beliefs=(), habitual_triggers=(), related_values=(),
              adhered_values=(), same_links=()):
        """
        Key every record by its ``key``. A repeated key, or an entity id made
        only of whitespace, is a ValueError.
        """
        stores = {
            "activities":        activities,
            "implementations":   implementations,
            "agents":            agents,
            "context_cues":      context_cues,
            "values":            values,
            "beliefs":           beliefs,
            "habitual_triggers": habitual_triggers,
            "related_values":    related_values,
            "adhered_values":    adhered_values,
            "same_links":        same_links,
        }
        keyed = {}
        for name, records in stores.items():
            keyed[name] = {}
            for record in records:
                if name in ENTITY_STORES and not record.id.strip():
                    raise ValueError(f"blank id in {name}: {record.id!r}")
                if record.key in keyed[name]:
                    raise ValueError(f"duplicate {name} record: {record.key!r}")
                keyed[name][record.key] = record
        return cls(**keyed)

    def __eq__(self, other):
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return all(
            dict(getattr(self, store.name)) == dict(getattr(other, store.name))
            for store in fields(self)
        )

    __hash__ = None

    def __repr__(self):
        counts = ", ".join(f"{name}={n}" for name, n in self.counts().items())
        return f"<KnowledgeBase {counts}>"

    def counts(self):
        return {store.name: len(getattr(self, store.name)) for store in fields(self)}

    # ── Lookup ──────────────────────────────────────────────
    def activity(self, activity_id):
        try:
            return self.activities[activity_id]
        except KeyError:
            raise UnknownReference("activity", activity_id) from None

    def agent(self, agent_id):
        try:
            return self.agents[agent_id]
        except KeyError:
            raise UnknownReference("agent", agent_id) from None

    def value(self, value_id):
        try:
            return self.values[value_id]
        except KeyError:
            raise UnknownReference("value", value_id) from None

    def resolve_cue(self, cue_id):
        """
        Kind of the entity a cue id names, or None. Agents and activities act
        as context cues without being declared as one.
        """
        if cue_id in self.context_cues:
            return self.context_cues[cue_id].kind
        if cue_id in self.agents:
            return CueKind.AGENT
        if cue_id in self.activities:
            return CueKind.ACTIVITY
        return None

    def cue(self, cue_id):
        kind = self.resolve_cue(cue_id)
        if kind is None:
            raise UnknownReference("context cue", cue_id)
        return kind

    # ── Activity tree ───────────────────────────────────────
    def children(self, parent_id):
        """C(p): every child implementing ``parent_id``, whatever the edge type."""
        self.activity(parent_id)
        return self._children.get(parent_id, frozenset())

    def parents(self, activity_id):
        self.activity(activity_id)
        return self._parents.get(activity_id, ())

    def is_leaf(self, activity_id):
        return not self.children(activity_id)

    def roots(self):
        return sorted(a for a in self.activities if a not in self._parents)

    def root(self):
        roots = self.roots()
        if len(roots) != 1:
            raise PreconditionError(f"activity tree needs exactly one root, found {len(roots)}")
        return roots[0]

    def child_implementations(self, parent_id):
        """Implementation records under ``parent_id``, ordered by child id."""
        return [
            self.implementations[(child, parent_id)]
            for child in sorted(self.children(parent_id))
        ]

    def ancestors(self, activity_id):
        """Path of parents from ``activity_id`` (exclusive) up to the root (inclusive)."""
        path    = []
        seen    = {activity_id}
        current = activity_id
        while True:
            parents = self.parents(current)
            if not parents:
                return path
            if len(parents) > 1:
                raise PreconditionError(f"{current!r} has {len(parents)} parents; not a tree")
            current = parents[0]
            if current in seen:
                raise PreconditionError(f"cycle through {current!r}; not a tree")
            seen.add(current)
            path.append(current)

    def subtree(self, activity_id):
        """``activity_id`` and every activity below it, parents before children."""
        order = []
        stack = [activity_id]
        seen  = set()
        while stack:
            current = stack.pop()
            if current in seen:
                raise PreconditionError(f"cycle through {current!r}; not a tree")
            seen.add(current)
            order.append(current)
            stack.extend(sorted(self.children(current), reverse=True))
        return order

    # ── Associations ────────────────────────────────────────
    def beliefs_of(self, agent_id):
        self.agent(agent_id)
        return sorted(self._beliefs_by_agent.get(agent_id, []), key=lambda b: b.activity)

    def belief(self, agent_id, activity_id):
        return self.beliefs.get((agent_id, activity_id))

    def triggers_of(self, activity_id):
        self.activity(activity_id)
        return sorted(self._triggers_by_activity.get(activity_id, []), key=lambda t: t.cue)

    def adherence_of(self, agent_id):
        self.agent(agent_id)
        return sorted(self._adherence_by_agent.get(agent_id, []), key=lambda a: a.value)

    def asserted_values(self, activity_id):
        """Asserted RelatedValue strengths of one activity, by value id."""
        return {
            value_id: self.related_values[(activity_id, value_id, Provenance.ASSERTED)].strength
            for value_id in sorted(self.values)
            if (activity_id, value_id, Provenance.ASSERTED) in self.related_values
        }
