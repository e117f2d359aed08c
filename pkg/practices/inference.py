"""
practices/inference.py

Derived knowledge over a KnowledgeBase:

- value inheritance: a parent relates to a value with the mean strength of
  its children, leaves use their asserted strength (0 when unasserted)
- the equivalence closure of ``same`` links between activity views
- social queries over beliefs: shared views, personal views, common ground
  and the values an observer expects from a commonly held view
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field

from .exceptions import UnknownReference
from .models import Provenance
from .validators import ensure_structure

logger = logging.getLogger(__name__)


# ──────────────────────────────────────────
# VALUE INHERITANCE
# ──────────────────────────────────────────
@dataclass(frozen=True)
class ValueConflict:
    activity: str
    value:    str
    asserted: float
    computed: float

    def as_dict(self):
        return {
            "activity": self.activity,
            "value":    self.value,
            "asserted": self.asserted,
            "computed": self.computed,
        }


@dataclass(frozen=True)
class InferredValueTable:
    """
    ``entries`` covers every (activity, value) pair supported by an asserted
    leaf somewhere in the activity's subtree; ``strength`` reads 0 for the
    rest.
    """
    activities: tuple
    values:     tuple
    entries:    dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    conflicts:  tuple = ()

    def strength(self, activity_id, value_id):
        return self.entries.get((activity_id, value_id), 0.0)

    def supported(self, activity_id):
        """Supported entries of one activity, by value id."""
        return {
            value_id: self.entries[(activity_id, value_id)]
            for value_id in self.values
            if (activity_id, value_id) in self.entries
        }

    def rows(self, dense=True, activity=None, value=None):
        """
        ``(activity, value, strength, provenance)`` tuples ordered by ids.
        Dense rows include every activity x value pair, unsupported ones at 0.
        """
        for activity_id in self.activities:
            if activity is not None and activity_id != activity:
                continue
            for value_id in self.values:
                if value is not None and value_id != value:
                    continue
                key = (activity_id, value_id)
                if key not in self.entries and not dense:
                    continue
                yield (
                    activity_id,
                    value_id,
                    self.entries.get(key, 0.0),
                    self.provenance.get(key, Provenance.INFERRED),
                )

    def _conflicts(self, activity=None, value=None):
        return [
            c for c in self.conflicts
            if (activity is None or c.activity == activity) and (value is None or c.value == value)
        ]

    def as_dict(self, activity=None, value=None):
        return {
            "relatedValues": [
                {"activity": a, "value": v, "strength": s, "provenance": str(p)}
                for a, v, s, p in self.rows(activity=activity, value=value)
            ],
            "conflicts": [c.as_dict() for c in self._conflicts(activity, value)],
        }

    def as_text(self, activity=None, value=None):
        """
        A ``[relatedvalues]`` section that reads back as scenario rows;
        conflicts follow as comments.
        """
        from .scenario import format_id, format_number

        lines = ["[relatedvalues]"]
        for a, v, s, p in self.rows(activity=activity, value=value):
            lines.append(
                f"relatedvalue {format_id(a)} {format_id(v)} strength={format_number(s)} provenance={p}"
            )
        for c in self._conflicts(activity, value):
            lines.append(
                f"# conflict {format_id(c.activity)} {format_id(c.value)} "
                f"asserted={format_number(c.asserted)} computed={format_number(c.computed)}"
            )
        return "\n".join(lines)


def infer_related_values(kb, tolerance=1e-9):
    """
    Compute s(a, v) bottom-up over the activity tree.

    Leaves take their asserted strength; every other activity averages all
    its children, allOf and partOf alike. Asserted values on non-leaves are
    kept in the knowledge base and compared against the average: a gap above
    ``tolerance`` becomes a ValueConflict.
    """
    ensure_structure(kb)

    root       = kb.root()
    order      = kb.subtree(root)
    entries    = {}
    provenance = {}
    support    = {}

    for activity_id in reversed(order):
        children = kb.children(activity_id)
        if not children:
            asserted = kb.asserted_values(activity_id)
            for value_id, strength in asserted.items():
                entries[(activity_id, value_id)]    = strength
                provenance[(activity_id, value_id)] = Provenance.ASSERTED
            support[activity_id] = set(asserted)
            continue

        supported = set().union(*(support[c] for c in children))
        for value_id in supported:
            # fsum is exact, so the mean does not depend on child order
            total = math.fsum(entries.get((c, value_id), 0.0) for c in children)
            entries[(activity_id, value_id)]    = total / len(children)
            provenance[(activity_id, value_id)] = Provenance.INFERRED
        support[activity_id] = supported

    conflicts = []
    for related in sorted(kb.related_values.values(), key=lambda r: r.key):
        if related.provenance != Provenance.ASSERTED or not kb.children(related.activity):
            continue
        computed = entries.get((related.activity, related.value), 0.0)
        if abs(related.strength - computed) > tolerance:
            conflicts.append(ValueConflict(
                related.activity, related.value, related.strength, computed
            ))

    logger.debug(f"Inferred {len(entries)} value strengths, {len(conflicts)} conflicts")
    return InferredValueTable(
        activities=tuple(sorted(kb.activities)),
        values=tuple(sorted(kb.values)),
        entries=entries,
        provenance=provenance,
        conflicts=tuple(conflicts),
    )


# ──────────────────────────────────────────
# SAME-VIEW CLOSURE
# ──────────────────────────────────────────
class DisjointSet:
    def __init__(self):
        self.parent = {}
        self.rank   = {}

    def make_set(self, e):
        if e in self.parent:
            return
        self.parent[e] = e
        self.rank[e]   = 0

    # find with path compression
    def find(self, e):
        self.make_set(e)
        root = e
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[e] != root:
            self.parent[e], e = root, self.parent[e]
        return root

    # union by rank
    def union(self, x, y):
        x_root = self.find(x)
        y_root = self.find(y)
        if x_root == y_root:
            return
        if self.rank[x_root] < self.rank[y_root]:
            x_root, y_root = y_root, x_root
        self.parent[y_root] = x_root
        if self.rank[x_root] == self.rank[y_root]:
            self.rank[x_root] += 1

    def sets(self):
        groups = defaultdict(set)
        for e in self.parent:
            groups[self.find(e)].add(e)
        return [frozenset(s) for s in groups.values()]


@dataclass(frozen=True)
class ViewPartition:
    """Equivalence classes of activity views, ordered by their smallest id."""
    classes: tuple

    def __post_init__(self):
        index = {member: cls for cls in self.classes for member in cls}
        object.__setattr__(self, "_index", index)

    def class_of(self, activity_id):
        try:
            return self._index[activity_id]
        except KeyError:
            raise UnknownReference("activity", activity_id) from None

    def same(self, a, b):
        return b in self.class_of(a)

    def non_singletons(self):
        return [cls for cls in self.classes if len(cls) > 1]


def same_closure(kb):
    """Reflexive, symmetric, transitive closure of the stored same links."""
    views = DisjointSet()
    for activity_id in kb.activities:
        views.make_set(activity_id)
    for link in sorted(kb.same_links.values(), key=lambda l: l.key):
        kb.activity(link.a)
        kb.activity(link.b)
        views.union(link.a, link.b)
    classes = sorted(views.sets(), key=min)
    return ViewPartition(tuple(classes))


# ──────────────────────────────────────────
# SOCIAL QUERIES
# ──────────────────────────────────────────
def _check_threshold(theta):
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"threshold {theta!r} outside [0, 1]")


def shared_views(kb, agent_id, theta_s):
    """Views the agent believes others hold with sharedStrength >= theta_s."""
    _check_threshold(theta_s)
    return frozenset(
        belief.activity for belief in kb.beliefs_of(agent_id)
        if belief.shared_strength >= theta_s
    )


def personal_views(kb, agent_id, theta_p):
    """Views the agent itself holds with personalStrength >= theta_p."""
    _check_threshold(theta_p)
    return frozenset(
        belief.activity for belief in kb.beliefs_of(agent_id)
        if belief.personal_strength >= theta_p
    )


def common_ground(kb, first_agent, second_agent, theta, partition=None):
    """
    Pairs (v1, v2) of personally held views, one per agent, that describe the
    same bodily movement. Identical views pair with themselves.
    """
    first  = personal_views(kb, first_agent, theta)
    second = personal_views(kb, second_agent, theta)
    if partition is None:
        partition = same_closure(kb)
    return frozenset(
        (v1, v2) for v1 in first for v2 in second if partition.same(v1, v2)
    )


def expected_values(kb, observer_id, activity_id, theta_s, table=None, partition=None):
    """
    Values the observer expects others to connect with ``activity_id``.

    Every view the observer believes to be shared (sharedStrength >= theta_s)
    and that is the same movement as ``activity_id`` contributes its values:
    an asserted value on the view itself first, its supported inherited value
    otherwise. Several contributing views are averaged per value.
    """
    _check_threshold(theta_s)
    kb.agent(observer_id)
    kb.activity(activity_id)
    if partition is None:
        partition = same_closure(kb)

    views = sorted(
        view for view in shared_views(kb, observer_id, theta_s)
        if partition.same(view, activity_id)
    )
    if not views:
        return {}
    if table is None:
        table = infer_related_values(kb)

    reported = defaultdict(list)
    for view in views:
        per_view = table.supported(view)
        per_view.update(kb.asserted_values(view))
        for value_id, strength in per_view.items():
            reported[value_id].append(strength)

    return {
        value_id: math.fsum(strengths) / len(strengths)
        for value_id, strengths in sorted(reported.items())
    }
