"""
practices/decision.py

Stepwise descent through the activity tree, from the top action to the leaf
actions an agent will perform.

At every choice point the fast habitual pathway is tried first: a candidate
whose context-cue activation reaches the habit threshold wins outright.
Otherwise the slow intentional pathway picks the candidate whose best
completion promotes the agent's values most. Compositions (partOf) are not
a choice: all their parts are entered.
"""
import logging
import math
from dataclasses import dataclass, field

from django.conf import settings
from django.db import models

from .exceptions import DecisionError
from .inference import infer_related_values
from .models import ImplementationType
from .signals import plan_decided
from .validators import ensure_valid

logger = logging.getLogger(__name__)


class Pathway(models.TextChoices):
    HABITUAL    = "habitual",    "Habitual"
    INTENTIONAL = "intentional", "Intentional"
    FORCED      = "forced",      "Forced"


class ChoiceRule(models.TextChoices):
    PART_OF     = "partOf",      "All parts entered"
    HABITUAL    = "habitual",    "Habit fired"
    INTENTIONAL = "intentional", "Best value score"


# ──────────────────────────────────────────
# CONFIGURATION
# ──────────────────────────────────────────
@dataclass(frozen=True)
class BeliefFilter:
    """``off``, or ``personal:<theta>`` to keep only personally believed candidates."""
    mode:  str = "off"
    theta: float = 0.0

    @classmethod
    def parse(cls, text):
        text = (text or "off").strip()
        if text == "off":
            return cls()
        mode, sep, theta = text.partition(":")
        if mode != "personal" or not sep:
            raise ValueError(f"belief filter must be 'off' or 'personal:<theta>', got {text!r}")
        try:
            theta = float(theta)
        except ValueError:
            raise ValueError(f"belief filter threshold is not a number: {theta!r}") from None
        if not 0.0 <= theta <= 1.0:
            raise ValueError(f"belief filter threshold {theta!r} outside [0, 1]")
        return cls("personal", theta)

    @property
    def enabled(self):
        return self.mode == "personal"

    def __str__(self):
        return f"personal:{self.theta!r}" if self.enabled else "off"


@dataclass(frozen=True)
class DecisionConfig:
    habit_threshold: float = 0.5
    belief_filter:   BeliefFilter = field(default_factory=BeliefFilter)

    def __post_init__(self):
        if not (math.isfinite(self.habit_threshold) and self.habit_threshold >= 0):
            raise ValueError(f"habit threshold must be a finite number >= 0, got {self.habit_threshold!r}")

    @classmethod
    def from_settings(cls):
        return cls(
            habit_threshold=settings.SOPRA_HABIT_THRESHOLD,
            belief_filter=BeliefFilter.parse(settings.SOPRA_BELIEF_FILTER),
        )

    def as_dict(self):
        return {"habitThreshold": self.habit_threshold, "beliefFilter": str(self.belief_filter)}


@dataclass(frozen=True)
class PerformanceContext:
    """Context cues present where the agent decides: cue, agent or activity ids."""
    present_cues: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "present_cues", frozenset(self.present_cues))

    @classmethod
    def parse(cls, text):
        """``"Home,Kid1"`` -> {Home, Kid1}; blanks are ignored."""
        return cls(frozenset(part.strip() for part in (text or "").split(",") if part.strip()))


# ──────────────────────────────────────────
# PLAN AND EXPLANATION
# ──────────────────────────────────────────
@dataclass(frozen=True)
class PlanStep:
    activity: str
    pathway:  str
    score:    float
    fallback: bool = False

    def as_dict(self):
        return {
            "activity": self.activity,
            "pathway":  str(self.pathway),
            "score":    self.score,
            "fallback": self.fallback,
        }


@dataclass(frozen=True)
class EnactmentPlan:
    agent:        str
    steps:        tuple
    leaf_actions: frozenset

    def step_for(self, activity_id):
        for step in self.steps:
            if step.activity == activity_id:
                return step
        return None

    def as_dict(self):
        return {
            "agent":       self.agent,
            "steps":       [step.as_dict() for step in self.steps],
            "leafActions": sorted(self.leaf_actions),
        }

    def as_text(self):
        from .scenario import format_id

        lines = []
        for step in self.steps:
            line = f"step {format_id(step.activity)} {step.pathway} score={step.score!r}"
            if step.fallback:
                line += " fallback"
            lines.append(line)
        lines.extend(f"action {format_id(a)}" for a in sorted(self.leaf_actions))
        return "\n".join(lines)


@dataclass(frozen=True)
class Candidate:
    activity:   str
    activation: float
    score:      float
    believed:   bool

    def as_dict(self):
        return {
            "activity":   self.activity,
            "activation": self.activation,
            "score":      self.score,
            "believed":   self.believed,
        }


@dataclass(frozen=True)
class ChoicePoint:
    activity:   str
    rule:       str
    candidates: tuple
    chosen:     tuple
    filter:     str
    fallback:   bool = False
    # another pooled candidate matched the winner; the smallest id was taken
    tie_break:  bool = False

    def as_dict(self):
        return {
            "activity":   self.activity,
            "rule":       str(self.rule),
            "filter":     self.filter,
            "fallback":   self.fallback,
            "tieBreak":   self.tie_break,
            "chosen":     list(self.chosen),
            "candidates": [c.as_dict() for c in self.candidates],
        }


@dataclass(frozen=True)
class Explanation:
    plan:          EnactmentPlan
    context:       PerformanceContext
    config:        DecisionConfig
    choice_points: tuple

    def as_dict(self):
        return {
            "plan":         self.plan.as_dict(),
            "context":      sorted(self.context.present_cues),
            "config":       self.config.as_dict(),
            "choicePoints": [cp.as_dict() for cp in self.choice_points],
        }

    def as_text(self):
        from .scenario import format_id

        cues  = ",".join(format_id(c) for c in sorted(self.context.present_cues)) or "-"
        lines = [
            f"agent {format_id(self.plan.agent)} context {cues} "
            f"habit-threshold {self.config.habit_threshold!r} belief-filter {self.config.belief_filter}"
        ]
        for point in self.choice_points:
            chosen = ",".join(format_id(c) for c in point.chosen)
            line   = f"choice {format_id(point.activity)} rule={point.rule} filter={point.filter} chosen={chosen}"
            if point.fallback:
                line += " fallback"
            if point.tie_break:
                line += " tie-break"
            lines.append(line)
            for cand in point.candidates:
                lines.append(
                    f"  candidate {format_id(cand.activity)} activation={cand.activation!r} "
                    f"score={cand.score!r} believed={'yes' if cand.believed else 'no'}"
                )
        return "\n".join(lines)


# ──────────────────────────────────────────
# SCORING
# ──────────────────────────────────────────
def habit_activation(kb, activity_id, context):
    """Summed strength of the activity's triggers whose cue is present."""
    return math.fsum(
        trigger.strength for trigger in kb.triggers_of(activity_id)
        if trigger.cue in context.present_cues
    )


def intentional_score(kb, agent_id, activity_id, table=None):
    """Sum over adhered values of adherence x inherited value strength."""
    kb.activity(activity_id)
    adherence = kb.adherence_of(agent_id)
    if not adherence:
        return 0.0
    if table is None:
        table = infer_related_values(kb)
    return math.fsum(a.strength * table.strength(activity_id, a.value) for a in adherence)


def best_completion(kb, agent_id, activity_id, table, memo=None):
    """
    Highest summed leaf score reachable below ``activity_id``: partOf parents
    add up all parts, allOf parents take their best child.
    """
    if memo is None:
        memo = {}
    if activity_id in memo:
        return memo[activity_id]

    # children before parents
    for current in reversed(kb.subtree(activity_id)):
        if current in memo:
            continue
        implementations = kb.child_implementations(current)
        if not implementations:
            memo[current] = intentional_score(kb, agent_id, current, table)
            continue
        scores = [memo[impl.child] for impl in implementations]
        if implementations[0].impl_type == ImplementationType.PART_OF:
            memo[current] = math.fsum(scores)
        else:
            memo[current] = max(scores)
    return memo[activity_id]


# ──────────────────────────────────────────
# DESCENT
# ──────────────────────────────────────────
class _Descent:
    def __init__(self, kb, agent_id, context, config):
        self.kb      = kb
        self.agent   = agent_id
        self.context = context
        self.config  = config
        self.table   = infer_related_values(kb)
        self.memo    = {}
        self.steps   = []
        self.leaves  = set()
        self.points  = []

    def best(self, activity_id):
        return best_completion(self.kb, self.agent, activity_id, self.table, self.memo)

    def candidate(self, activity_id):
        belief = self.kb.belief(self.agent, activity_id)
        return Candidate(
            activity=activity_id,
            activation=habit_activation(self.kb, activity_id, self.context),
            score=self.best(activity_id),
            believed=bool(
                belief and belief.personal_strength >= self.config.belief_filter.theta
            ),
        )

    def run(self):
        root    = self.kb.root()
        pathway = Pathway.INTENTIONAL if self.kb.is_leaf(root) else Pathway.FORCED
        # preorder: a step is followed by the steps below it
        pending = [(root, pathway, self.best(root), False)]
        while pending:
            pending.extend(reversed(self.visit(*pending.pop())))
        return EnactmentPlan(self.agent, tuple(self.steps), frozenset(self.leaves))

    def visit(self, activity_id, pathway, score, fallback=False):
        """Record the step for ``activity_id``; return the steps to take below it."""
        self.steps.append(PlanStep(activity_id, pathway, score, fallback))
        implementations = self.kb.child_implementations(activity_id)
        if not implementations:
            self.leaves.add(activity_id)
            return []

        candidates = [self.candidate(impl.child) for impl in implementations]
        if implementations[0].impl_type == ImplementationType.PART_OF:
            self.points.append(ChoicePoint(
                activity_id, ChoiceRule.PART_OF, tuple(candidates),
                tuple(c.activity for c in candidates), "off",
            ))
            return [(c.activity, Pathway.FORCED, c.score, False) for c in candidates]

        fallback = False
        pool     = candidates
        if self.config.belief_filter.enabled:
            pool = [c for c in candidates if c.believed]
            if not pool:
                pool, fallback = candidates, True
        if not pool:
            raise DecisionError(f"no candidate left below {activity_id!r}")

        fired = [c for c in pool if c.activation >= self.config.habit_threshold]
        if fired:
            winner  = min(fired, key=lambda c: (-c.activation, c.activity))
            tied    = [c for c in fired if c.activation == winner.activation]
            rule    = ChoiceRule.HABITUAL
            pathway = Pathway.HABITUAL
            score   = winner.activation
        else:
            winner  = min(pool, key=lambda c: (-c.score, c.activity))
            tied    = [c for c in pool if c.score == winner.score]
            rule    = ChoiceRule.INTENTIONAL
            pathway = Pathway.INTENTIONAL
            score   = winner.score

        self.points.append(ChoicePoint(
            activity_id, rule, tuple(candidates), (winner.activity,),
            str(self.config.belief_filter), fallback, tie_break=len(tied) > 1,
        ))
        return [(winner.activity, pathway, score, fallback)]


def _descend(kb, agent_id, context, config):
    ensure_valid(kb)
    kb.agent(agent_id)
    for cue_id in context.present_cues:
        kb.cue(cue_id)

    descent = _Descent(kb, agent_id, context, config)
    plan    = descent.run()
    plan_decided.send(
        sender=_Descent, kb=kb, agent=agent_id, context=context, config=config, plan=plan
    )
    return plan, tuple(descent.points)


def decide(kb, agent_id, context, config=None):
    """Return the agent's EnactmentPlan in ``context``."""
    config  = config or DecisionConfig()
    plan, _ = _descend(kb, agent_id, context, config)
    return plan


def explain(kb, agent_id, context, config=None):
    """The plan of ``decide`` plus every choice point with all its candidates."""
    config       = config or DecisionConfig()
    plan, points = _descend(kb, agent_id, context, config)
    return Explanation(plan, context, config, points)
