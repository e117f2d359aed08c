from django.conf import settings

from practices.inference import infer_related_values

from ._base import SopraCommand


class Command(SopraCommand):
    help = "Print the related-value strengths every activity inherits from its subtree."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--activity", help="Only rows for this activity id.")
        parser.add_argument("--value", help="Only rows for this value id.")

    def run(self, kb, **options):
        self.require_valid(kb, options)

        activity, value = options["activity"], options["value"]
        if activity is not None:
            kb.activity(activity)
        if value is not None:
            kb.value(value)

        table = infer_related_values(kb, tolerance=settings.SOPRA_CONFLICT_TOLERANCE)
        if options["json"]:
            self.write_json(table.as_dict(activity=activity, value=value))
        else:
            self.write_text(table.as_text(activity=activity, value=value))
