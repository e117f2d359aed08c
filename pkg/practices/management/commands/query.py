"""
sopra query <file> <subcommand>

Social queries over the beliefs in a scenario:

- shared-views     views an agent believes others hold
- personal-views   views an agent holds itself
- common-ground    pairs of personal views two agents share
- expected-values  values an observer expects others to connect with a view
- same-classes     groups of views describing the same bodily movement
"""
from practices.inference import (
    common_ground, expected_values, personal_views, same_closure, shared_views,
)
from practices.scenario import format_id, format_number

from ._base import SopraCommand, id_pair, unit_interval


class Command(SopraCommand):
    help = "Answer a social query (shared views, common ground, expected values) over a scenario."

    def add_arguments(self, parser):
        parser.add_argument("file", help="Scenario file (.sopra text or .json mirror).")
        queries = parser.add_subparsers(dest="query", required=True, metavar="query")

        sub = queries.add_parser("shared-views", help="Views an agent believes to be shared.")
        sub.add_argument("--agent", required=True)
        sub.add_argument("--theta", type=unit_interval, required=True, help="Minimum shared strength.")

        sub = queries.add_parser("personal-views", help="Views an agent holds itself.")
        sub.add_argument("--agent", required=True)
        sub.add_argument("--theta", type=unit_interval, required=True, help="Minimum personal strength.")

        sub = queries.add_parser("common-ground", help="Personal views two agents have in common.")
        sub.add_argument("--agents", type=id_pair, required=True, help="Two agent ids, comma separated.")
        sub.add_argument("--theta", type=unit_interval, required=True, help="Minimum personal strength.")

        sub = queries.add_parser("expected-values", help="Values an observer expects from a view.")
        sub.add_argument("--observer", required=True)
        sub.add_argument("--activity", required=True)
        sub.add_argument("--theta", type=unit_interval, required=True, help="Minimum shared strength.")

        queries.add_parser("same-classes", help="Groups of views of the same movement.")

        # --json goes after the subcommand like every other option
        for sub in queries.choices.values():
            sub.add_argument("--json", action="store_true", help="Write JSON instead of text.")

    def run(self, kb, **options):
        self.require_valid(kb, options)
        handler = {
            "shared-views":    self.shared_views,
            "personal-views":  self.personal_views,
            "common-ground":   self.common_ground,
            "expected-values": self.expected_values,
            "same-classes":    self.same_classes,
        }[options["query"]]
        handler(kb, options)

    # ── Views ───────────────────────────────────────────────
    def _write_views(self, agent, theta, views, options):
        views = sorted(views)
        if options["json"]:
            self.write_json({"agent": agent, "theta": theta, "views": views})
        else:
            self.write_text("\n".join(f"view {format_id(v)}" for v in views))

    def shared_views(self, kb, options):
        views = shared_views(kb, options["agent"], options["theta"])
        self._write_views(options["agent"], options["theta"], views, options)

    def personal_views(self, kb, options):
        views = personal_views(kb, options["agent"], options["theta"])
        self._write_views(options["agent"], options["theta"], views, options)

    # ── Common ground ───────────────────────────────────────
    def common_ground(self, kb, options):
        agents = options["agents"]
        pairs = sorted(common_ground(kb, agents[0], agents[1], options["theta"]))
        if options["json"]:
            self.write_json({
                "agents": agents,
                "theta":  options["theta"],
                "pairs":  [list(pair) for pair in pairs],
            })
        else:
            self.write_text("\n".join(f"pair {format_id(a)} {format_id(b)}" for a, b in pairs))

    # ── Expected values ─────────────────────────────────────
    def expected_values(self, kb, options):
        expected = expected_values(kb, options["observer"], options["activity"], options["theta"])
        if options["json"]:
            self.write_json({
                "observer": options["observer"],
                "activity": options["activity"],
                "theta":    options["theta"],
                "values":   expected,
            })
        else:
            self.write_text("\n".join(
                f"value {format_id(v)} strength={format_number(s)}" for v, s in expected.items()
            ))

    # ── Same-view classes ───────────────────────────────────
    def same_classes(self, kb, options):
        classes = [sorted(cls) for cls in same_closure(kb).non_singletons()]
        if options["json"]:
            self.write_json({"classes": classes})
        else:
            self.write_text("\n".join(
                "class " + " ".join(format_id(a) for a in cls) for cls in classes
            ))
