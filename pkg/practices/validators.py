"""
practices/validators.py

Rule checks over a KnowledgeBase. Every check returns a list of Violation
records instead of raising, so one pass reports every finding:

- REF             every association names declared entities
- TREE            the Implementation graph is a directed tree with a root
- ROOT_UNIQUE     exactly one parentless activity
- TYPE_MISMATCH   asserted activity types agree with the tree position
- TYPE_PARTITION  a parent's children are all allOf or all partOf
- PARTOF_SIBLING  no parent has a lone partOf child
- SAME_KIND       declared cue kinds agree with the entity they name
- RANGE           strengths and habit rates lie in [0, 1]
- VALUE_CONFLICT  asserted non-leaf values agree with the tree average (warning)
"""
import logging
from collections import deque
from dataclasses import dataclass

from django.db import models

from .exceptions import PreconditionError
from .models import ActivityType, CueKind, ImplementationType

logger = logging.getLogger(__name__)


class RuleId(models.TextChoices):
    TREE           = "TREE",           "Activity hierarchy is a directed tree"
    ROOT_UNIQUE    = "ROOT_UNIQUE",    "Exactly one top action"
    TYPE_PARTITION = "TYPE_PARTITION", "Children of a parent share one implementation type"
    PARTOF_SIBLING = "PARTOF_SIBLING", "partOf children come with a sibling"
    RANGE          = "RANGE",          "Strengths lie in [0, 1]"
    REF            = "REF",            "References resolve"
    SAME_KIND      = "SAME_KIND",      "Cue kinds match the entity they name"
    TYPE_MISMATCH  = "TYPE_MISMATCH",  "Asserted activity type matches tree position"
    VALUE_CONFLICT = "VALUE_CONFLICT", "Asserted value matches inherited value"


class Severity(models.TextChoices):
    ERROR   = "error",   "Error"
    WARNING = "warning", "Warning"


@dataclass(frozen=True)
class Violation:
    rule_id:  str
    severity: str
    entities: tuple
    message:  str

    @classmethod
    def error(cls, rule_id, entities, message):
        return cls(rule_id, Severity.ERROR, tuple(entities), message)

    @classmethod
    def warning(cls, rule_id, entities, message):
        return cls(rule_id, Severity.WARNING, tuple(entities), message)

    @property
    def sort_key(self):
        return (str(self.rule_id), self.entities, self.message)

    def as_text(self):
        from .scenario import format_id

        entities = ",".join(format_id(e) for e in self.entities) or "-"
        return f"{self.rule_id} {self.severity} {entities} {self.message}"

    def as_dict(self):
        return {
            "ruleId":   str(self.rule_id),
            "severity": str(self.severity),
            "entities": list(self.entities),
            "message":  self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def errors(self):
        return [v for v in self.violations if v.severity == Severity.ERROR]

    @property
    def warnings(self):
        return [v for v in self.violations if v.severity == Severity.WARNING]

    @property
    def is_valid(self):
        return not self.errors

    def rule_ids(self):
        return [str(v.rule_id) for v in self.violations]

    def summary(self):
        return f"{len(self.errors)} errors, {len(self.warnings)} warnings"

    def as_text(self):
        return "\n".join(v.as_text() for v in self.violations)

    def as_dict(self):
        return {
            "valid":      self.is_valid,
            "errors":     len(self.errors),
            "warnings":   len(self.warnings),
            "violations": [v.as_dict() for v in self.violations],
        }


# ════════════════════════════════════════════════════════════
# REFERENTIAL INTEGRITY
# ════════════════════════════════════════════════════════════
def check_references(kb):
    violations = []

    def dangling(kind, ref, owner):
        violations.append(Violation.error(
            RuleId.REF, (ref,), f"{owner} references unknown {kind} {ref!r}"
        ))

    for impl in kb.implementations.values():
        for ref in (impl.child, impl.parent):
            if ref not in kb.activities:
                dangling("activity", ref, "implementation")

    for belief in kb.beliefs.values():
        if belief.agent not in kb.agents:
            dangling("agent", belief.agent, "belief")
        if belief.activity not in kb.activities:
            dangling("activity", belief.activity, "belief")

    for trigger in kb.habitual_triggers.values():
        if trigger.activity not in kb.activities:
            dangling("activity", trigger.activity, "habitual trigger")
        if kb.resolve_cue(trigger.cue) is None:
            dangling("context cue", trigger.cue, "habitual trigger")

    for related in kb.related_values.values():
        if related.activity not in kb.activities:
            dangling("activity", related.activity, "related value")
        if related.value not in kb.values:
            dangling("value", related.value, "related value")

    for adhered in kb.adhered_values.values():
        if adhered.agent not in kb.agents:
            dangling("agent", adhered.agent, "adhered value")
        if adhered.value not in kb.values:
            dangling("value", adhered.value, "adhered value")

    for link in kb.same_links.values():
        for ref in (link.a, link.b):
            if ref not in kb.activities:
                dangling("activity", ref, "same link")

    return violations


# ════════════════════════════════════════════════════════════
# TREE SHAPE
# ════════════════════════════════════════════════════════════
def validate_tree(kb):
    """
    Empty iff the Implementation graph over the declared activities is a
    directed tree: one parentless root, at most one parent per activity, no
    cycles, every activity reaching the root and |I| = |A| - 1.
    """
    violations = []
    if not kb.activities:
        return [Violation.error(RuleId.TREE, (), "no activities declared: a tree needs a root")]

    edges = [
        impl for impl in kb.implementations.values()
        if impl.child in kb.activities and impl.parent in kb.activities
    ]
    parents  = {}
    children = {}
    for impl in edges:
        if impl.child == impl.parent:
            violations.append(Violation.error(
                RuleId.TREE, (impl.child,), "activity implements itself"
            ))
        parents.setdefault(impl.child, set()).add(impl.parent)
        children.setdefault(impl.parent, set()).add(impl.child)

    for child in sorted(parents):
        if len(parents[child]) > 1:
            others = ", ".join(repr(p) for p in sorted(parents[child]))
            violations.append(Violation.error(
                RuleId.TREE, (child,), f"activity has {len(parents[child])} parents: {others}"
            ))

    roots = sorted(a for a in kb.activities if a not in parents)
    if not roots:
        violations.append(Violation.error(
            RuleId.TREE, (), "every activity has a parent: no root exists"
        ))
    elif len(roots) > 1:
        violations.append(Violation.error(
            RuleId.ROOT_UNIQUE, roots, f"{len(roots)} activities have no parent"
        ))
        violations.append(Violation.error(
            RuleId.TREE, roots, "activity hierarchy is not connected"
        ))
    else:
        reached = {roots[0]}
        queue   = deque([roots[0]])
        while queue:
            for child in children.get(queue.popleft(), ()):
                if child not in reached:
                    reached.add(child)
                    queue.append(child)
        unreached = sorted(set(kb.activities) - reached)
        if unreached:
            violations.append(Violation.error(
                RuleId.TREE, unreached, f"{len(unreached)} activities do not reach the root {roots[0]!r}"
            ))

    if not violations and len(edges) != len(kb.activities) - 1:
        violations.append(Violation.error(
            RuleId.TREE, (),
            f"{len(edges)} implementations for {len(kb.activities)} activities; a tree has |A| - 1"
        ))
    return violations


def ensure_structure(kb):
    """Raise PreconditionError unless references resolve and the hierarchy is a tree."""
    problems = check_references(kb) + validate_tree(kb)
    if problems:
        raise PreconditionError(
            f"knowledge base is not a well-formed activity tree: {problems[0].as_text()}"
        )


def classify_types(kb):
    """
    Derive Action / AbstractAction / TopAction from the tree position.

    Returns ``(types, violations)``; violations hold a TYPE_MISMATCH for every
    activity whose asserted type disagrees. A lone root that is also a leaf
    is a TopAction.
    """
    if validate_tree(kb):
        raise PreconditionError("activity types are only defined on a valid tree")

    root  = kb.root()
    types = {}
    for activity_id in sorted(kb.activities):
        if activity_id == root:
            types[activity_id] = ActivityType.TOP_ACTION
        elif kb.is_leaf(activity_id):
            types[activity_id] = ActivityType.ACTION
        else:
            types[activity_id] = ActivityType.ABSTRACT_ACTION

    violations = []
    for activity_id, derived in types.items():
        asserted = kb.activities[activity_id].asserted_type
        if asserted is not None and asserted != derived:
            violations.append(Violation.error(
                RuleId.TYPE_MISMATCH, (activity_id,),
                f"asserted type {asserted} but tree position makes it {derived}"
            ))
    return types, violations


def check_partition(kb):
    """A parent mixing allOf and partOf children has no defined semantics."""
    violations = []
    for parent in sorted(kb.activities):
        kinds = {impl.impl_type for impl in kb.child_implementations(parent)}
        if len(kinds) > 1:
            violations.append(Violation.error(
                RuleId.TYPE_PARTITION, (parent,), "children mix allOf and partOf implementations"
            ))
    return violations


def check_part_of(kb):
    """Every partOf child needs a distinct partOf sibling under the same parent."""
    violations = []
    for parent in sorted(kb.activities):
        part_of = [
            impl.child for impl in kb.child_implementations(parent)
            if impl.impl_type == ImplementationType.PART_OF
        ]
        if len(part_of) == 1:
            violations.append(Violation.error(
                RuleId.PARTOF_SIBLING, (parent,),
                f"only one partOf child ({part_of[0]!r}); a composition needs at least two parts"
            ))
    return violations


# ════════════════════════════════════════════════════════════
# CUES AND RANGES
# ════════════════════════════════════════════════════════════
def _out_of_range(x):
    return not (0.0 <= x <= 1.0)


def check_cue_kinds(kb):
    violations = []

    for cue in sorted(kb.context_cues.values(), key=lambda c: c.id):
        is_agent    = cue.id in kb.agents
        is_activity = cue.id in kb.activities
        if cue.kind == CueKind.AGENT and not is_agent:
            message = "declared as an agent cue but no agent has this id"
        elif cue.kind == CueKind.ACTIVITY and not is_activity:
            message = "declared as an activity cue but no activity has this id"
        elif cue.kind in (CueKind.OBJECT, CueKind.LOCATION) and (is_agent or is_activity):
            named   = "agent" if is_agent else "activity"
            message = f"declared as {cue.kind} but the id names an {named}"
        else:
            continue
        violations.append(Violation.error(RuleId.SAME_KIND, (cue.id,), message))

    ranged = []
    for agent in kb.agents.values():
        ranged.append(((agent.id,), "agent habitRate", agent.habit_rate))
    for belief in kb.beliefs.values():
        ranged.append((belief.key, "belief personalStrength", belief.personal_strength))
        ranged.append((belief.key, "belief sharedStrength", belief.shared_strength))
    for trigger in kb.habitual_triggers.values():
        ranged.append((trigger.key, "habitual trigger strength", trigger.strength))
    for related in kb.related_values.values():
        ranged.append(((related.activity, related.value), "related value strength", related.strength))
    for adhered in kb.adhered_values.values():
        ranged.append((adhered.key, "adhered value strength", adhered.strength))

    for entities, what, x in ranged:
        if _out_of_range(x):
            violations.append(Violation.error(
                RuleId.RANGE, entities, f"{what} {x!r} outside [0, 1]"
            ))
    return violations


def check_value_inheritance(kb, tolerance=1e-9):
    from .inference import infer_related_values

    table = infer_related_values(kb, tolerance=tolerance)
    return [
        Violation.warning(
            RuleId.VALUE_CONFLICT, (c.activity, c.value),
            f"asserted {c.asserted!r} but children average to {c.computed!r}"
        )
        for c in table.conflicts
    ]


# ════════════════════════════════════════════════════════════
# ENTRY POINT
# ════════════════════════════════════════════════════════════
def validate(kb, tolerance=1e-9):
    """
    Run every rule check and return a deterministic ValidationReport.

    Composition checks look at each parent on its own and always run. Checks
    that presuppose a tree (types, value inheritance) only run once the tree
    checks pass; value inheritance also waits for clean references and a
    clean implementation-type partition.
    """
    references = check_references(kb)
    tree       = validate_tree(kb)
    partition  = check_partition(kb)
    violations = references + tree + partition + check_part_of(kb) + check_cue_kinds(kb)

    if not tree:
        _, mismatches = classify_types(kb)
        violations   += mismatches
        if not references and not partition:
            violations += check_value_inheritance(kb, tolerance=tolerance)

    report = ValidationReport(tuple(sorted(violations, key=lambda v: v.sort_key)))
    logger.debug(f"Validated {kb!r}: {report.summary()}")
    return report


def ensure_valid(kb, tolerance=1e-9):
    report = validate(kb, tolerance=tolerance)
    if not report.is_valid:
        raise PreconditionError(
            f"knowledge base is invalid ({report.summary()}): {report.errors[0].as_text()}"
        )
    return report
