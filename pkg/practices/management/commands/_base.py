"""
practices/management/commands/_base.py

Plumbing shared by the sopra commands: scenario loading, text / JSON output
and the exit-code contract (0 success, 1 semantic failure, 2 I/O or parse
failure).
"""
import argparse
import json
import math

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from practices import scenario
from practices.exceptions import ScenarioError, SopraError
from practices.validators import validate


def unit_interval(text):
    """argparse type: a float in [0, 1]."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return value


def non_negative(text):
    """argparse type: a finite float >= 0."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value < 0:
        raise argparse.ArgumentTypeError(f"{text} must be a finite number >= 0")
    return value


def id_list(text):
    """argparse type: comma-separated ids, blanks dropped."""
    return [part.strip() for part in text.split(",") if part.strip()]


def id_pair(text):
    """argparse type: exactly two comma-separated ids."""
    ids = id_list(text)
    if len(ids) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated ids, got {len(ids)}")
    return ids


class SopraCommand(BaseCommand):
    """
    Base for commands that read one scenario file. Subclasses implement
    ``run(kb, **options)``; SopraError and ValueError raised there exit 1.
    """
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("file", help="Scenario file (.sopra text or .json mirror).")
        parser.add_argument("--json", action="store_true", help="Write JSON instead of text.")

    def execute(self, *args, **options):
        # SOPRA_COLOR only applies when no colour flag was given
        if not options.get("force_color") and not options.get("no_color"):
            if settings.SOPRA_COLOR is True:
                options["force_color"] = True
            elif settings.SOPRA_COLOR is False:
                options["no_color"] = True
        return super().execute(*args, **options)

    def handle(self, *args, **options):
        kb = self.load(options["file"], as_json=options["json"])
        try:
            self.run(kb, **options)
        except (SopraError, ValueError) as exc:
            raise CommandError(str(exc), returncode=1) from exc

    def run(self, kb, **options):
        raise NotImplementedError

    # ── Loading ─────────────────────────────────────────────
    def load(self, path, as_json=False):
        try:
            return scenario.load(path)
        except OSError as exc:
            raise CommandError(f"cannot read {path}: {exc.strerror or exc}", returncode=2) from exc
        except ScenarioError as exc:
            if as_json:
                self.write_json({"file": str(path), "errors": [e.as_dict() for e in exc.errors]})
            else:
                for error in exc.errors:
                    self.stderr.write(f"{path}:{error}")
            raise CommandError(str(exc), returncode=2) from exc

    def require_valid(self, kb, options):
        """Emit the report and exit 1 unless ``kb`` validates without errors."""
        report = validate(kb, tolerance=settings.SOPRA_CONFLICT_TOLERANCE)
        if not report.is_valid:
            self.emit(report, options)
            raise CommandError(f"{options['file']}: {report.summary()}", returncode=1)
        return report

    # ── Output ──────────────────────────────────────────────
    def write_json(self, data):
        self.stdout.write(json.dumps(data, indent=2, ensure_ascii=False))

    def write_text(self, text):
        if text:
            self.stdout.write(text)

    def emit(self, result, options):
        """Write a result object through its ``as_dict`` or ``as_text``."""
        if options["json"]:
            self.write_json(result.as_dict())
        else:
            self.write_text(result.as_text())
