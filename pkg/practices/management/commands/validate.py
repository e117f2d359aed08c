from django.conf import settings
from django.core.management.base import CommandError

from practices.validators import Severity, validate

from ._base import SopraCommand


class Command(SopraCommand):
    help = "Check a scenario file against the rules of the model and report every violation."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--strict", action="store_true",
            help="Fail on warnings too.",
        )

    def run(self, kb, **options):
        report = validate(kb, tolerance=settings.SOPRA_CONFLICT_TOLERANCE)

        if options["json"]:
            self.write_json(report.as_dict())
        else:
            for violation in report.violations:
                style = self.style.ERROR if violation.severity == Severity.ERROR else self.style.WARNING
                self.stdout.write(style(violation.as_text()))
            style = self.style.SUCCESS if report.is_valid else self.style.ERROR
            self.stdout.write(style(report.summary()))

        if report.errors or (options["strict"] and report.warnings):
            raise CommandError(f"{options['file']}: {report.summary()}", returncode=1)
