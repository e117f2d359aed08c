from practices.scenario import serialize, serialize_json

from ._base import SopraCommand


class Command(SopraCommand):
    help = "Re-write a scenario in canonical form, as .sopra text or as the JSON mirror."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--format", choices=["sopra", "json"], default="sopra",
            help="Output format (default: sopra). --json is a shorthand for --format json.",
        )

    def run(self, kb, **options):
        fmt = "json" if options["json"] else options["format"]
        text = serialize_json(kb) if fmt == "json" else serialize(kb)
        self.stdout.write(text, ending="")
