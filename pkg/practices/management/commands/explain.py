from practices.decision import PerformanceContext, explain

from .decide import DecisionCommand


class Command(DecisionCommand):
    help = "Show every choice point of an agent's decision with all candidates."

    def run(self, kb, **options):
        context     = PerformanceContext(options["context"])
        explanation = explain(kb, options["agent"], context, self.decision_config(options))
        self.emit(explanation, options)
