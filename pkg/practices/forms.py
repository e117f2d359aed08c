"""
practices/forms.py

One form per scenario row kind. The scenario reader binds every row (text or
JSON) to its form; form errors become ParseErrors at the offending token.

Field names follow the JSON mirror schema; the text format maps its short
keys onto them (see ``scenario.SECTIONS``).
"""
from django import forms

from .models import (
    Activity, ActivityType, AdheredValue, Agent, Belief, ContextCue, CueKind,
    HabitualTrigger, Implementation, ImplementationType, Provenance,
    RelatedValue, SameLink, Value,
)


class IdField(forms.CharField):
    """Non-empty id; surrounding spaces are part of a quoted id."""

    def __init__(self, **kwargs):
        kwargs.setdefault("strip", False)
        super().__init__(**kwargs)

    def validate(self, value):
        super().validate(value)
        if value is not None and not value.strip():
            raise forms.ValidationError("Id must contain a non-blank character.")


class StrengthField(forms.FloatField):
    def __init__(self, **kwargs):
        super().__init__(min_value=0.0, max_value=1.0, **kwargs)


class RowForm(forms.Form):
    def to_record(self):
        raise NotImplementedError


# ──────────────────────────────────────────
# ENTITY ROWS
# ──────────────────────────────────────────
class ActivityRowForm(RowForm):
    id    = IdField(label="Activity")
    label = forms.CharField(required=False, strip=False, label="Label")
    type  = forms.ChoiceField(choices=ActivityType.choices, required=False, label="Type")

    def to_record(self):
        data = self.cleaned_data
        return Activity(data["id"], data["label"], data["type"] or None)


class AgentRowForm(RowForm):
    id        = IdField(label="Agent")
    habitRate = StrengthField(required=False, label="Habit rate")

    def clean_habitRate(self):
        rate = self.cleaned_data.get("habitRate")
        return 0.0 if rate is None else rate

    def to_record(self):
        return Agent(self.cleaned_data["id"], self.cleaned_data["habitRate"])


class ContextCueRowForm(RowForm):
    id   = IdField(label="Context cue")
    kind = forms.ChoiceField(choices=CueKind.choices, required=False, label="Kind")

    def to_record(self):
        return ContextCue(self.cleaned_data["id"], self.cleaned_data["kind"] or CueKind.OBJECT)


class ValueRowForm(RowForm):
    id    = IdField(label="Value")
    label = forms.CharField(required=False, strip=False, label="Label")

    def to_record(self):
        return Value(self.cleaned_data["id"], self.cleaned_data["label"])


# ──────────────────────────────────────────
# ASSOCIATION ROWS
# ──────────────────────────────────────────
class ImplementationRowForm(RowForm):
    child  = IdField(label="Child activity")
    parent = IdField(label="Parent activity")
    type   = forms.ChoiceField(choices=ImplementationType.choices, label="Implementation type")

    def to_record(self):
        data = self.cleaned_data
        return Implementation(data["child"], data["parent"], data["type"])


class BeliefRowForm(RowForm):
    agent            = IdField(label="Agent")
    activity         = IdField(label="Activity")
    personalStrength = StrengthField(label="Personal strength")
    sharedStrength   = StrengthField(label="Shared strength")

    def to_record(self):
        data = self.cleaned_data
        return Belief(data["agent"], data["activity"], data["personalStrength"], data["sharedStrength"])


class HabitualTriggerRowForm(RowForm):
    activity = IdField(label="Activity")
    cue      = IdField(label="Context cue")
    strength = StrengthField(label="Strength")

    def to_record(self):
        data = self.cleaned_data
        return HabitualTrigger(data["activity"], data["cue"], data["strength"])


class RelatedValueRowForm(RowForm):
    activity   = IdField(label="Activity")
    value      = IdField(label="Value")
    strength   = StrengthField(label="Strength")
    provenance = forms.ChoiceField(choices=Provenance.choices, required=False, label="Provenance")

    def to_record(self):
        data = self.cleaned_data
        return RelatedValue(
            data["activity"], data["value"], data["strength"],
            data["provenance"] or Provenance.ASSERTED,
        )


class AdheredValueRowForm(RowForm):
    agent    = IdField(label="Agent")
    value    = IdField(label="Value")
    strength = StrengthField(label="Strength")

    def to_record(self):
        data = self.cleaned_data
        return AdheredValue(data["agent"], data["value"], data["strength"])


class SameRowForm(RowForm):
    a = IdField(label="Activity")
    b = IdField(label="Activity")

    def to_record(self):
        return SameLink(self.cleaned_data["a"], self.cleaned_data["b"])
