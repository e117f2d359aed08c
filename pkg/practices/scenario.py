"""
practices/scenario.py

Reading and writing knowledge bases.

Text format (``.sopra``), one row per line, mirroring a Class / Instance /
Attribute table::

    version = 1

    [activities]
    activity "Commuting 1" type=TopAction

    [beliefs]
    belief Alice "Commuting 1" personal=0.1 shared=0.8

Ids with spaces or special characters are double-quoted (``\\"``, ``\\\\``,
``\\n``, ``\\t`` and ``\\r`` escapes). ``#`` starts a comment. The JSON mirror
has one top-level array per section, named like the section.

The reader collects every error before giving up and raises a single
ScenarioError; it never returns a partially read knowledge base.
"""
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from django import forms

from .exceptions import ScenarioError
from .forms import (
    ActivityRowForm, AdheredValueRowForm, AgentRowForm, BeliefRowForm,
    ContextCueRowForm, HabitualTriggerRowForm, ImplementationRowForm,
    RelatedValueRowForm, SameRowForm, ValueRowForm,
)
from .models import KnowledgeBase, Provenance
from .signals import knowledge_base_loaded

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


# ──────────────────────────────────────────
# ERRORS
# ──────────────────────────────────────────
@dataclass(frozen=True)
class ParseError:
    line:     int
    column:   int
    expected: str
    found:    str
    message:  str
    path:     str = ""

    def __str__(self):
        where = f"{self.line}:{self.column}"
        if self.path:
            where += f" ({self.path})"
        return f"{where}: {self.message}"

    def as_dict(self):
        return {
            "line":     self.line,
            "column":   self.column,
            "path":     self.path,
            "expected": self.expected,
            "found":    self.found,
            "message":  self.message,
        }


@dataclass(frozen=True)
class Location:
    line:   int
    column: int
    path:   str = ""


# ──────────────────────────────────────────
# SECTIONS
# ──────────────────────────────────────────
@dataclass(frozen=True)
class Section:
    """
    One row kind. ``positional`` and ``keys`` map text-format syntax onto
    form fields; ``references`` lists (form field, entity kind) pairs that
    must resolve once every row has been read.
    """
    name:       str
    keyword:    str
    store:      str
    form:       type
    positional: tuple
    keys:       dict
    references: tuple = ()

    @property
    def fields(self):
        return tuple(self.positional) + tuple(self.keys.values())


SECTIONS = (
    Section("activities", "activity", "activities", ActivityRowForm,
            ("id",), {"label": "label", "type": "type"}),
    Section("agents", "agent", "agents", AgentRowForm,
            ("id",), {"habitRate": "habitRate"}),
    Section("contextcues", "contextcue", "context_cues", ContextCueRowForm,
            ("id",), {"kind": "kind"}),
    Section("values", "value", "values", ValueRowForm,
            ("id",), {"label": "label"}),
    Section("implementations", "implementation", "implementations", ImplementationRowForm,
            ("child", "parent"), {"type": "type"},
            (("child", "activity"), ("parent", "activity"))),
    Section("beliefs", "belief", "beliefs", BeliefRowForm,
            ("agent", "activity"), {"personal": "personalStrength", "shared": "sharedStrength"},
            (("agent", "agent"), ("activity", "activity"))),
    Section("habitualtriggers", "habitualtrigger", "habitual_triggers", HabitualTriggerRowForm,
            ("activity", "cue"), {"strength": "strength"},
            (("activity", "activity"), ("cue", "cue"))),
    Section("relatedvalues", "relatedvalue", "related_values", RelatedValueRowForm,
            ("activity", "value"), {"strength": "strength", "provenance": "provenance"},
            (("activity", "activity"), ("value", "value"))),
    Section("adheredvalues", "adheredvalue", "adhered_values", AdheredValueRowForm,
            ("agent", "value"), {"strength": "strength"},
            (("agent", "agent"), ("value", "value"))),
    Section("same", "same", "same_links", SameRowForm,
            ("a", "b"), {},
            (("a", "activity"), ("b", "activity"))),
)

SECTIONS_BY_NAME = {section.name: section for section in SECTIONS}

# The UML calls them context cues, the use-case table context elements.
SECTION_ALIASES  = {"contextelements": "contextcues"}
KEYWORD_ALIASES  = {"contextelement": "contextcue"}


# ──────────────────────────────────────────
# TOKENS
# ──────────────────────────────────────────
_BARE_ID = re.compile(r'[^\s"=\[\]#\\]+')
_TOKEN   = re.compile(r'''
      (?P<space>\s+)
    | (?P<comment>\#.*)
    | (?P<string>"(?:[^"\\]|\\.)*")
    | (?P<equals>=)
    | (?P<open>\[)
    | (?P<close>\])
    | (?P<word>[^\s"=\[\]\#]+)
''', re.VERBOSE)
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind:   str
    text:   str
    line:   int
    column: int

    @property
    def location(self):
        return Location(self.line, self.column)

    @property
    def is_value(self):
        return self.kind in ("word", "string")


def format_id(value):
    """Bare when the id is a single plain word, double-quoted otherwise."""
    if _BARE_ID.fullmatch(value):
        return value
    escaped = (
        value.replace("\\", "\\\\").replace('"', '\\"')
        .replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    )
    return f'"{escaped}"'


def format_number(value):
    """Shortest decimal that reads back as the same float."""
    return repr(float(value))


# ════════════════════════════════════════════════════════════
# READER
# ════════════════════════════════════════════════════════════
class ScenarioReader:
    """
    Collects rows from text or JSON, validates each through its form, then
    checks duplicates and references across rows.
    """

    def __init__(self):
        self.errors  = []
        self.records = {section.name: {} for section in SECTIONS}

    def error(self, location, expected, found, message):
        self.errors.append(ParseError(
            location.line, location.column, expected, found, message, location.path
        ))

    # ── Text ────────────────────────────────────────────────
    def read_text(self, text):
        section       = None
        version_seen  = False
        for line_no, line in enumerate(text.split("\n"), start=1):
            if line.endswith("\r"):
                line = line[:-1]
            tokens = self._tokenize(line, line_no)
            if tokens is None or not tokens:
                continue

            first = tokens[0]
            if first.kind == "open":
                section = self._read_header(tokens)
                continue
            if first.kind == "word" and first.text == "version" and len(tokens) > 1 \
                    and tokens[1].kind == "equals":
                self._read_version(tokens, section, version_seen)
                version_seen = True
                continue
            self._read_row(tokens, section)
        return self.finish()

    def _tokenize(self, line, line_no):
        tokens = []
        pos    = 0
        while pos < len(line):
            column = pos + 1
            match  = _TOKEN.match(line, pos)
            if match is None:
                # only an unterminated string gets here
                self.error(Location(line_no, column), 'closing "', "end of line",
                           "unterminated quoted string")
                return None
            kind = match.lastgroup
            pos  = match.end()
            if kind in ("space", "comment"):
                continue
            text = match.group()
            if kind == "string":
                text = self._unescape(text[1:-1], line_no, column)
                if text is None:
                    return None
            tokens.append(Token(kind, text, line_no, column))
        return tokens

    def _unescape(self, body, line_no, column):
        out = []
        i   = 0
        while i < len(body):
            ch = body[i]
            if ch == "\\":
                escape = body[i + 1]
                if escape not in _ESCAPES:
                    self.error(Location(line_no, column + i + 1), "escape \\n \\t \\r \\\" or \\\\",
                               f"\\{escape}", f"unknown escape sequence \\{escape}")
                    return None
                out.append(_ESCAPES[escape])
                i += 2
                continue
            out.append(ch)
            i += 1
        return "".join(out)

    def _read_header(self, tokens):
        if len(tokens) != 3 or tokens[1].kind != "word" or tokens[2].kind != "close":
            found = " ".join(t.text for t in tokens)
            self.error(tokens[0].location, "[section]", found, "malformed section header")
            return None
        name = SECTION_ALIASES.get(tokens[1].text.lower(), tokens[1].text.lower())
        if name not in SECTIONS_BY_NAME:
            known = ", ".join(s.name for s in SECTIONS)
            self.error(tokens[1].location, f"one of {known}", tokens[1].text,
                       f"unknown section [{tokens[1].text}]")
            return None
        return SECTIONS_BY_NAME[name]

    def _read_version(self, tokens, section, version_seen):
        location = tokens[0].location
        if section is not None or version_seen:
            self.error(location, "rows", "version",
                       "version must appear once, before the first section")
            return
        if len(tokens) != 3 or not tokens[2].is_value:
            self.error(location, "version = 1", " ".join(t.text for t in tokens),
                       "malformed version header")
            return
        if tokens[2].text != str(FORMAT_VERSION):
            self.error(tokens[2].location, str(FORMAT_VERSION), tokens[2].text,
                       f"unsupported format version {tokens[2].text}")

    def _read_row(self, tokens, section):
        keyword = tokens[0]
        if keyword.kind != "word":
            self.error(keyword.location, "row keyword", keyword.text, "row must start with a keyword")
            return
        if section is None:
            self.error(keyword.location, "[section]", keyword.text, "row outside of any section")
            return
        name = KEYWORD_ALIASES.get(keyword.text.lower(), keyword.text.lower())
        if name != section.keyword:
            self.error(keyword.location, section.keyword, keyword.text,
                       f"[{section.name}] holds {section.keyword} rows, found {keyword.text!r}")
            return

        values    = {}
        locations = {}
        positional = list(section.positional)
        i = 1
        ok = True
        while i < len(tokens):
            token = tokens[i]
            is_pair = (
                token.kind == "word" and i + 1 < len(tokens) and tokens[i + 1].kind == "equals"
            )
            if is_pair:
                if i + 2 >= len(tokens) or not tokens[i + 2].is_value:
                    self.error(tokens[i + 1].location, "value after '='", "end of row",
                               f"attribute {token.text} has no value")
                    ok = False
                    break
                field_name = section.keys.get(token.text)
                if field_name is None:
                    known = ", ".join(section.keys) or "none"
                    self.error(token.location, f"attribute ({known})", token.text,
                               f"unknown attribute {token.text!r} for {section.keyword}")
                    ok = False
                elif field_name in values:
                    self.error(token.location, "each attribute once", token.text,
                               f"attribute {token.text!r} given twice")
                    ok = False
                else:
                    values[field_name]    = tokens[i + 2].text
                    locations[field_name] = tokens[i + 2].location
                i += 3
                continue
            if not token.is_value:
                self.error(token.location, "id or attribute", token.text,
                           f"unexpected {token.text!r}")
                ok = False
                i += 1
                continue
            if not positional:
                self.error(token.location, "attribute or end of row", token.text,
                           f"too many ids for {section.keyword}")
                ok = False
                i += 1
                continue
            field_name = positional.pop(0)
            values[field_name]    = token.text
            locations[field_name] = token.location
            i += 1

        if positional:
            last = tokens[-1]
            end  = Location(last.line, last.column + len(last.text))
            self.error(end, positional[0], "end of row",
                       f"{section.keyword} needs {len(section.positional)} ids, "
                       f"missing {', '.join(positional)}")
            ok = False
        if ok:
            self.accept(section, values, locations, keyword.location)

    # ── JSON ────────────────────────────────────────────────
    def read_json(self, text):
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            self.error(Location(exc.lineno, exc.colno), "JSON", text[exc.pos:exc.pos + 10],
                       f"invalid JSON: {exc.msg}")
            return self.finish()
        except RecursionError:
            self.error(Location(1, 1), "JSON", "deep nesting", "JSON nesting too deep")
            return self.finish()

        top = Location(1, 1)
        if not isinstance(document, dict):
            self.error(top, "object", type(document).__name__, "JSON document must be an object")
            return self.finish()

        for key, rows in document.items():
            where = Location(1, 1, key)
            if key == "version":
                if rows != FORMAT_VERSION or isinstance(rows, bool):
                    self.error(where, str(FORMAT_VERSION), repr(rows), f"unsupported format version {rows!r}")
                continue
            name = SECTION_ALIASES.get(key, key)
            if name not in SECTIONS_BY_NAME:
                self.error(where, "section name", key, f"unknown section {key!r}")
                continue
            section = SECTIONS_BY_NAME[name]
            if not isinstance(rows, list):
                self.error(where, "array", type(rows).__name__, f"section {key!r} must be an array")
                continue
            for index, row in enumerate(rows):
                self._read_json_row(section, row, f"{key}[{index}]")
        return self.finish()

    def _read_json_row(self, section, row, path):
        if not isinstance(row, dict):
            self.error(Location(1, 1, path), "object", type(row).__name__, "row must be an object")
            return
        values    = {}
        locations = {}
        ok        = True
        for field_name, raw in row.items():
            where = Location(1, 1, f"{path}.{field_name}")
            if field_name not in section.fields:
                self.error(where, ", ".join(section.fields), field_name,
                           f"unknown attribute {field_name!r} for {section.keyword}")
                ok = False
                continue
            numeric  = isinstance(section.form.base_fields[field_name], forms.FloatField)
            expected = "number" if numeric else "string"
            if isinstance(raw, bool) or not isinstance(raw, (int, float) if numeric else str):
                self.error(where, expected, type(raw).__name__, f"{field_name} must be a {expected}")
                ok = False
                continue
            if numeric:
                try:
                    raw = float(raw)
                except OverflowError:
                    self.error(where, "number in [0, 1]", "huge integer", f"{field_name} is out of range")
                    ok = False
                    continue
            values[field_name]    = raw
            locations[field_name] = where
        if ok:
            self.accept(section, values, locations, Location(1, 1, path))

    # ── Shared ──────────────────────────────────────────────
    def accept(self, section, values, locations, row_location):
        form = section.form(data=values)
        if not form.is_valid():
            for field_name, messages in form.errors.items():
                where = locations.get(field_name, row_location)
                found = values.get(field_name, "nothing")
                for message in messages:
                    self.error(where, field_name, str(found),
                               f"{section.keyword} {field_name}: {message}")
            return

        record = form.to_record()
        store  = self.records[section.name]
        if record.key in store:
            first = store[record.key][1]
            self.error(row_location, f"unique {section.keyword}", repr(record.key),
                       f"duplicate {section.keyword} {record.key!r}, first declared at line {first.line}")
            return
        store[record.key] = (record, row_location, locations)

    def _declared(self, kind, ref):
        if kind == "cue":
            return any(
                ref in self.records[name]
                for name in ("contextcues", "agents", "activities")
            )
        store = {"activity": "activities", "agent": "agents", "value": "values"}[kind]
        return ref in self.records[store]

    def finish(self):
        if not self.errors and not self.records["activities"]:
            self.error(Location(1, 1), "activity rows", "no activities", "no activities declared")

        for section in SECTIONS:
            for record, row_location, locations in self.records[section.name].values():
                for field_name, kind in section.references:
                    ref = getattr(record, field_name)
                    if not self._declared(kind, ref):
                        where = locations.get(field_name, row_location)
                        noun  = "context cue, agent or activity" if kind == "cue" else kind
                        self.error(where, f"declared {noun}", ref,
                                   f"{section.keyword} references undeclared {noun} {ref!r}")

        if self.errors:
            errors = sorted(self.errors, key=lambda e: (e.line, e.column, e.path, e.message))
            raise ScenarioError(errors)

        return KnowledgeBase.build(**{
            section.store: [entry[0] for entry in self.records[section.name].values()]
            for section in SECTIONS
        })


# ════════════════════════════════════════════════════════════
# PUBLIC API
# ════════════════════════════════════════════════════════════
def parse(text):
    """Read a knowledge base from ``.sopra`` text; raises ScenarioError."""
    return ScenarioReader().read_text(text)


def parse_json(text):
    """Read a knowledge base from the JSON mirror; raises ScenarioError."""
    return ScenarioReader().read_json(text)


def decode(data):
    """UTF-8 bytes to text, reporting an undecodable byte as a ParseError."""
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        prefix = data[:exc.start]
        line   = prefix.count(b"\n") + 1
        column = exc.start - (prefix.rfind(b"\n") + 1) + 1
        raise ScenarioError([ParseError(
            line, column, "UTF-8 text", repr(data[exc.start:exc.end]),
            f"file is not valid UTF-8: {exc.reason}",
        )]) from None


def load(path):
    """
    Read a scenario file, choosing the reader by extension (``.json`` or
    text). OSError is left to the caller.
    """
    path = Path(path)
    text = decode(path.read_bytes())
    kb   = parse_json(text) if path.suffix.lower() == ".json" else parse(text)
    knowledge_base_loaded.send(sender=ScenarioReader, kb=kb, source=str(path))
    return kb


# ════════════════════════════════════════════════════════════
# WRITERS
# ════════════════════════════════════════════════════════════
def _sorted_records(kb, section):
    return sorted(getattr(kb, section.store).values(), key=lambda r: r.key)


def _row_fields(section, record):
    """
    (form field, value) pairs of one record in canonical order; values equal
    to what the reader would default to are left out.
    """
    name = section.name
    if name == "activities":
        pairs = [("id", record.id)]
        if record.label != record.id:
            pairs.append(("label", record.label))
        if record.asserted_type is not None:
            pairs.append(("type", str(record.asserted_type)))
        return pairs
    if name == "agents":
        return [("id", record.id), ("habitRate", record.habit_rate)]
    if name == "contextcues":
        return [("id", record.id), ("kind", str(record.kind))]
    if name == "values":
        pairs = [("id", record.id)]
        if record.label != record.id:
            pairs.append(("label", record.label))
        return pairs
    if name == "implementations":
        return [("child", record.child), ("parent", record.parent), ("type", str(record.impl_type))]
    if name == "beliefs":
        return [
            ("agent", record.agent), ("activity", record.activity),
            ("personalStrength", record.personal_strength),
            ("sharedStrength", record.shared_strength),
        ]
    if name == "habitualtriggers":
        return [("activity", record.activity), ("cue", record.cue), ("strength", record.strength)]
    if name == "relatedvalues":
        pairs = [("activity", record.activity), ("value", record.value), ("strength", record.strength)]
        if record.provenance != Provenance.ASSERTED:
            pairs.append(("provenance", str(record.provenance)))
        return pairs
    if name == "adheredvalues":
        return [("agent", record.agent), ("value", record.value), ("strength", record.strength)]
    return [("a", record.a), ("b", record.b)]


def format_row(section, record):
    short = {field_name: key for key, field_name in section.keys.items()}
    parts = [section.keyword]
    for field_name, value in _row_fields(section, record):
        if isinstance(value, float):
            text = format_number(value)
        else:
            text = format_id(value)
        if field_name in section.positional:
            parts.append(text)
        else:
            parts.append(f"{short[field_name]}={text}")
    return " ".join(parts)


def serialize(kb):
    """Canonical ``.sopra`` text: fixed section order, rows sorted by key."""
    lines = [f"version = {FORMAT_VERSION}"]
    for section in SECTIONS:
        records = _sorted_records(kb, section)
        if not records:
            continue
        lines.append("")
        lines.append(f"[{section.name}]")
        lines.extend(format_row(section, record) for record in records)
    return "\n".join(lines) + "\n"


def as_json_document(kb):
    document = {"version": FORMAT_VERSION}
    for section in SECTIONS:
        document[section.name] = [
            dict(_row_fields(section, record)) for record in _sorted_records(kb, section)
        ]
    return document


def serialize_json(kb):
    """Canonical JSON mirror; every section present, rows sorted by key."""
    return json.dumps(as_json_document(kb), indent=2, ensure_ascii=False) + "\n"
