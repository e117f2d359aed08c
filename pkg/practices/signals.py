"""
practices/signals.py

Signals sent by the engine, plus the audit-logging receivers for them:
1. knowledge_base_loaded: a scenario file or JSON document was read
2. plan_decided: an agent's enactment plan was computed
"""
from django.dispatch import Signal, receiver
import logging

logger = logging.getLogger(__name__)

# kwargs: kb, source
knowledge_base_loaded = Signal()

# kwargs: kb, agent, context, config, plan
plan_decided = Signal()


@receiver(knowledge_base_loaded)
def log_knowledge_base_loaded(sender, kb, source, **kwargs):
    counts = kb.counts()
    logger.info(
        f"Loaded {source}: {counts['activities']} activities, "
        f"{counts['agents']} agents, {counts['beliefs']} beliefs"
    )


@receiver(plan_decided)
def log_plan_decided(sender, kb, agent, context, config, plan, **kwargs):
    """
    One line per decision. Habitual steps are worth a separate line: they are
    the ones where the context overruled the agent's values.
    """
    cues = ",".join(sorted(context.present_cues)) or "-"
    logger.info(
        f"Decision for {agent} in context [{cues}]: "
        f"{', '.join(sorted(plan.leaf_actions))}"
    )
    for step in plan.steps:
        if step.pathway == "habitual":
            logger.info(f"  habit fired at {step.activity} (activation {step.score!r})")
