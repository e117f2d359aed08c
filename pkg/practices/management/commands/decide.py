from practices.decision import BeliefFilter, DecisionConfig, PerformanceContext, decide, explain

from ._base import SopraCommand, id_list, non_negative


class DecisionCommand(SopraCommand):
    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--agent", required=True, help="Deciding agent id.")
        parser.add_argument(
            "--context", type=id_list, default=[],
            help="Present context cues, comma separated (cue, agent or activity ids).",
        )
        parser.add_argument(
            "--habit-threshold", type=non_negative, default=None,
            help="Activation at which a habit fires (default: SOPRA_HABIT_THRESHOLD).",
        )
        parser.add_argument(
            "--belief-filter", type=BeliefFilter.parse, default=None,
            help="'off' or 'personal:<theta>' (default: SOPRA_BELIEF_FILTER).",
        )

    def decision_config(self, options):
        defaults = DecisionConfig.from_settings()
        return DecisionConfig(
            habit_threshold=(
                defaults.habit_threshold if options["habit_threshold"] is None
                else options["habit_threshold"]
            ),
            belief_filter=options["belief_filter"] or defaults.belief_filter,
        )


class Command(DecisionCommand):
    help = "Compute the actions an agent performs in a context, top action to leaves."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--explain", action="store_true", help="Append every choice point.")

    def run(self, kb, **options):
        context = PerformanceContext(options["context"])
        config  = self.decision_config(options)

        if not options["explain"]:
            self.emit(decide(kb, options["agent"], context, config), options)
            return

        explanation = explain(kb, options["agent"], context, config)
        if options["json"]:
            self.write_json(explanation.as_dict())
        else:
            self.write_text(explanation.plan.as_text())
            self.write_text(explanation.as_text())
