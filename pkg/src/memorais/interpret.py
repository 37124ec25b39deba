"""Rule application: normalized label text to schedule parameters.

Rules run in catalog order and each match overwrites the parameter its rule
owns (last match wins); time-of-day assignments accumulate as a set union.
Every match is recorded so each returned value can be traced to the rule and
text span that produced it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .catalog import (
    DurationUnit,
    FrequencyUnit,
    RuleKind,
    Ruleset,
    TimeOfDay,
    scan_matches,
    sort_times_of_day,
)
from .errors import InterpretationFailure, MalformedInput
from .textnorm import LabelText


class RuleMatch(NamedTuple):
    """Audit record: which rule matched which half-open span of the text."""

    rule_id: str
    start: int
    end: int


@dataclass(frozen=True)
class ScheduleParameters:
    """The interpreter's output record.

    frequency is intakes per frequency_unit (for example 1/2 per day means one
    intake every second day). duration and duration_unit are present together
    or not at all; absence means an open-ended prescription.
    """

    frequency: Fraction
    frequency_unit: FrequencyUnit
    duration: int | None = None
    duration_unit: DurationUnit | None = None
    time_of_days: tuple[TimeOfDay, ...] = ()
    matches: tuple[RuleMatch, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "frequency", Fraction(self.frequency))
        object.__setattr__(self, "frequency_unit", FrequencyUnit(self.frequency_unit))
        if self.duration_unit is not None:
            object.__setattr__(self, "duration_unit", DurationUnit(self.duration_unit))
        object.__setattr__(self, "time_of_days", sort_times_of_day(self.time_of_days))
        if self.frequency <= 0:
            raise ValueError("frequency must be positive")
        if (self.duration is None) != (self.duration_unit is None):
            raise ValueError("duration and duration_unit must be present together")
        if self.duration is not None and self.duration <= 0:
            raise ValueError("duration must be positive")


def interpret(label: LabelText, rs: Ruleset) -> ScheduleParameters:
    """Apply the catalog to the label text and collect schedule parameters.

    Raises InterpretationFailure when no frequency rule matches: a label
    without a recognizable intake frequency is not turned into a guessed
    schedule.
    """
    frequency: Fraction | None = None
    frequency_unit: FrequencyUnit | None = None
    duration: int | None = None
    duration_unit: DurationUnit | None = None
    times: set[TimeOfDay] = set()
    recorded: list[RuleMatch] = []

    for rule, match in scan_matches(rs, label.text):
        recorded.append(RuleMatch(rule.id, match.start(), match.end()))
        if rule.kind is RuleKind.FREQUENCY:
            frequency = rule.frequency
            frequency_unit = rule.frequency_unit
            times.update(rule.time_of_days)
        else:
            duration = int(match.group(1))
            duration_unit = rule.duration_unit

    if frequency is None or frequency_unit is None:
        raise InterpretationFailure(label.text, tuple(recorded))

    return ScheduleParameters(
        frequency=frequency,
        frequency_unit=frequency_unit,
        duration=duration,
        duration_unit=duration_unit,
        time_of_days=sort_times_of_day(times),
        matches=tuple(recorded),
    )


def params_to_json(params: ScheduleParameters, normalized_text: str = "") -> bytes:
    """Serialize parameters (plus the normalized text they came from).

    The normalized text travels with the parameters so that a staged pipeline
    can reproduce the deterministic event UIDs of the one-shot pipeline.
    """
    doc = {
        "normalized_text": normalized_text,
        "frequency": {
            "num": params.frequency.numerator,
            "den": params.frequency.denominator,
        },
        "frequency_unit": params.frequency_unit.value,
        "duration": params.duration,
        "duration_unit": params.duration_unit.value if params.duration_unit else None,
        "time_of_days": [t.value for t in params.time_of_days],
        "matches": [
            {"rule_id": m.rule_id, "start": m.start, "end": m.end} for m in params.matches
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def params_from_json(raw: bytes | str) -> tuple[ScheduleParameters, str]:
    """Inverse of params_to_json. Raises MalformedInput on any defect."""
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput("parameters document must be an object")
    try:
        freq_raw = doc["frequency"]
        frequency = Fraction(freq_raw["num"], freq_raw["den"])
        frequency_unit = FrequencyUnit(doc["frequency_unit"])
        duration = doc.get("duration")
        duration_unit_raw = doc.get("duration_unit")
        duration_unit = DurationUnit(duration_unit_raw) if duration_unit_raw else None
        time_of_days = sort_times_of_day(TimeOfDay(t) for t in doc.get("time_of_days", []))
        matches = tuple(
            RuleMatch(m["rule_id"], m["start"], m["end"]) for m in doc.get("matches", [])
        )
        normalized_text = doc.get("normalized_text", "")
        if not isinstance(normalized_text, str):
            raise MalformedInput("normalized_text must be a string")
        params = ScheduleParameters(
            frequency=frequency,
            frequency_unit=frequency_unit,
            duration=duration,
            duration_unit=duration_unit,
            time_of_days=time_of_days,
            matches=matches,
        )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"bad parameters document: {exc}") from exc
    return params, normalized_text
