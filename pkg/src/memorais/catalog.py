"""Loadable catalog of frequency and duration indicator rules.

Rules live in a JSON document rather than in code so that catalogs can be
extended, linted and versioned without touching the engine. Application order
is catalog order; the interpreter's last matching rule wins.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterator, Sequence

from .errors import CatalogError
from .textnorm import normalize_texts


class RuleKind(str, Enum):
    FREQUENCY = "frequency_indicator"
    DURATION = "duration_indicator"


class FrequencyUnit(str, Enum):
    HOURS = "hours"
    DAYS = "days"
    WEEKS = "weeks"
    MONTHS = "months"


class DurationUnit(str, Enum):
    DAYS = "days"
    WEEKS = "weeks"
    MONTHS = "months"


class TimeOfDay(str, Enum):
    MORNING = "morning"
    MIDDAY = "midday"
    AFTERNOON = "afternoon"
    EVENING = "evening"


_TIME_OF_DAY_ORDER = {t: i for i, t in enumerate(TimeOfDay)}


def sort_times_of_day(values) -> tuple[TimeOfDay, ...]:
    """Canonical order: morning, midday, afternoon, evening."""
    return tuple(sorted(set(values), key=_TIME_OF_DAY_ORDER.__getitem__))


@dataclass(frozen=True)
class Rule:
    """One indicator pattern and the parameter values it writes.

    Frequency rules carry a fixed rational frequency (intakes per unit) and
    optionally time-of-day assignments; their patterns must not contain
    capturing groups. Duration rules capture the duration value from the text,
    so their patterns must contain exactly one capturing group.
    """

    id: str
    kind: RuleKind
    pattern: str
    frequency: Fraction | None = None
    frequency_unit: FrequencyUnit | None = None
    duration_unit: DurationUnit | None = None
    time_of_days: tuple[TimeOfDay, ...] = ()
    priority: int = 0
    compiled: re.Pattern = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not self.id:
            raise CatalogError(None, "rule id must be non-empty")
        try:
            compiled = re.compile(self.pattern)
        except re.error as exc:
            raise CatalogError(self.id, f"pattern does not compile: {exc}") from exc
        object.__setattr__(self, "compiled", compiled)

        if self.kind is RuleKind.FREQUENCY:
            if self.frequency is None or self.frequency_unit is None:
                raise CatalogError(self.id, "frequency rule needs frequency and frequency_unit")
            if self.frequency <= 0:
                raise CatalogError(self.id, "frequency must be positive")
            if self.duration_unit is not None:
                raise CatalogError(self.id, "frequency rule must not set duration_unit")
            if compiled.groups != 0:
                raise CatalogError(
                    self.id,
                    "frequency pattern must not contain capturing groups (use (?:...))",
                )
        else:
            if self.duration_unit is None:
                raise CatalogError(self.id, "duration rule needs duration_unit")
            if compiled.groups != 1:
                raise CatalogError(
                    self.id, "duration pattern must contain exactly one capture group"
                )
            if self.frequency is not None or self.frequency_unit is not None:
                raise CatalogError(self.id, "duration rule must not set frequency fields")
            if self.time_of_days:
                raise CatalogError(self.id, "duration rule must not set time_of_days")


@dataclass(frozen=True)
class Ruleset:
    """Immutable, validated rule catalog. Order defines application order."""

    rules: tuple[Rule, ...]
    version: str = "0"

    def __post_init__(self):
        seen = set()
        for rule in self.rules:
            if rule.id in seen:
                raise CatalogError(rule.id, "duplicate rule id")
            seen.add(rule.id)

    @property
    def frequency_rules(self) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.kind is RuleKind.FREQUENCY)

    @property
    def duration_rules(self) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.kind is RuleKind.DURATION)


def _parse_rule(entry, position: int) -> Rule:
    if not isinstance(entry, dict):
        raise CatalogError(None, f"rule at position {position} is not an object")
    rule_id = entry.get("id")
    if not isinstance(rule_id, str) or not rule_id:
        raise CatalogError(None, f"rule at position {position} has no usable id")

    allowed = {"id", "kind", "pattern", "frequency", "frequency_unit", "duration_unit", "time_of_days"}
    unknown = set(entry) - allowed
    if unknown:
        raise CatalogError(rule_id, f"unknown field(s): {', '.join(sorted(unknown))}")

    try:
        kind = RuleKind(entry.get("kind"))
    except ValueError:
        raise CatalogError(rule_id, f"unknown kind {entry.get('kind')!r}") from None
    pattern = entry.get("pattern")
    if not isinstance(pattern, str) or not pattern:
        raise CatalogError(rule_id, "missing or empty pattern")

    frequency = None
    if "frequency" in entry:
        raw = entry["frequency"]
        if (
            not isinstance(raw, dict)
            or set(raw) != {"num", "den"}
            or not all(isinstance(raw[k], int) and not isinstance(raw[k], bool) for k in ("num", "den"))
        ):
            raise CatalogError(rule_id, "frequency must be {\"num\": int, \"den\": int}")
        if raw["num"] < 1 or raw["den"] < 1:
            raise CatalogError(rule_id, "frequency num and den must be >= 1")
        frequency = Fraction(raw["num"], raw["den"])

    def _enum(field_name, enum_cls):
        if field_name not in entry:
            return None
        try:
            return enum_cls(entry[field_name])
        except ValueError:
            raise CatalogError(rule_id, f"bad {field_name} {entry[field_name]!r}") from None

    frequency_unit = _enum("frequency_unit", FrequencyUnit)
    duration_unit = _enum("duration_unit", DurationUnit)

    time_of_days: tuple[TimeOfDay, ...] = ()
    if "time_of_days" in entry:
        raw = entry["time_of_days"]
        if not isinstance(raw, list):
            raise CatalogError(rule_id, "time_of_days must be a list")
        try:
            time_of_days = tuple(TimeOfDay(v) for v in raw)
        except ValueError:
            raise CatalogError(rule_id, f"bad time_of_days {raw!r}") from None

    return Rule(
        id=rule_id,
        kind=kind,
        pattern=pattern,
        frequency=frequency,
        frequency_unit=frequency_unit,
        duration_unit=duration_unit,
        time_of_days=time_of_days,
        priority=position,
    )


def load_ruleset(raw: bytes | str) -> Ruleset:
    """Parse and fully validate a catalog document.

    Raises CatalogError naming the offending rule and reason on any invariant
    violation (duplicate id, uncompilable pattern, missing or forbidden field).
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CatalogError(None, f"catalog is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CatalogError(None, "catalog must be a JSON object")
    unknown = set(data) - {"version", "rules", "notes"}
    if unknown:
        raise CatalogError(None, f"unknown top-level field(s): {', '.join(sorted(unknown))}")
    version = data.get("version")
    if not isinstance(version, str) or not version:
        raise CatalogError(None, "catalog needs a non-empty string version")
    rules_raw = data.get("rules")
    if not isinstance(rules_raw, list):
        raise CatalogError(None, "catalog needs a rules array")
    rules = tuple(_parse_rule(entry, i) for i, entry in enumerate(rules_raw))
    return Ruleset(rules=rules, version=version)


def serialize_ruleset(rs: Ruleset) -> bytes:
    """Serialize a Ruleset back to its catalog document form."""
    entries = []
    for rule in rs.rules:
        entry: dict = {"id": rule.id, "kind": rule.kind.value, "pattern": rule.pattern}
        if rule.frequency is not None:
            entry["frequency"] = {
                "num": rule.frequency.numerator,
                "den": rule.frequency.denominator,
            }
        if rule.frequency_unit is not None:
            entry["frequency_unit"] = rule.frequency_unit.value
        if rule.duration_unit is not None:
            entry["duration_unit"] = rule.duration_unit.value
        if rule.time_of_days:
            entry["time_of_days"] = [t.value for t in rule.time_of_days]
        entries.append(entry)
    doc = {"version": rs.version, "rules": entries}
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


@lru_cache(maxsize=1)
def default_ruleset() -> Ruleset:
    """The catalog shipped with the package."""
    raw = resources.files("memorais").joinpath("data/default_rules.json").read_bytes()
    return load_ruleset(raw)


def scan_matches(rs: Ruleset, text: str) -> Iterator[tuple[Rule, re.Match]]:
    """Yield every rule match against text, in rule order then text position.

    Duration matches whose captured number is zero are suppressed: a zero-day
    duration cannot be scheduled and such captures only arise from degenerate
    label text.
    """
    for rule in rs.rules:
        for match in rule.compiled.finditer(text):
            if rule.kind is RuleKind.DURATION and int(match.group(1)) == 0:
                continue
            yield rule, match


@dataclass(frozen=True)
class LintEntry:
    """Lint findings for one corpus string."""

    text: str
    normalized_text: str
    matched_rule_ids: tuple[str, ...]
    conflicts: tuple[str, ...]
    frequency_matched: bool


@dataclass(frozen=True)
class LintReport:
    entries: tuple[LintEntry, ...]
    unmatched_strings: tuple[str, ...]
    unused_rule_ids: tuple[str, ...]

    @property
    def has_findings(self) -> bool:
        return bool(self.unmatched_strings) or any(e.conflicts for e in self.entries)


def lint_ruleset(rs: Ruleset, corpus: Sequence[str]) -> LintReport:
    """Check a catalog against a corpus of direction strings.

    Corpus strings run through the same normalization as real labels. A string
    is unmatched when no frequency rule fires; a conflict is a parameter
    (frequency or duration) written by more than one match. Rules that never
    fire across the whole corpus are reported as unused.
    """
    entries = []
    unmatched = []
    used_ids: set[str] = set()
    for text in corpus:
        normalized = normalize_texts([text]).text
        matched_ids = []
        writes = {"frequency": 0, "duration": 0}
        for rule, _match in scan_matches(rs, normalized):
            matched_ids.append(rule.id)
            used_ids.add(rule.id)
            if rule.kind is RuleKind.FREQUENCY:
                writes["frequency"] += 1
            else:
                writes["duration"] += 1
        conflicts = tuple(name for name, count in writes.items() if count > 1)
        frequency_matched = writes["frequency"] > 0
        entries.append(
            LintEntry(
                text=text,
                normalized_text=normalized,
                matched_rule_ids=tuple(matched_ids),
                conflicts=conflicts,
                frequency_matched=frequency_matched,
            )
        )
        if not frequency_matched:
            unmatched.append(text)
    unused = tuple(rule.id for rule in rs.rules if rule.id not in used_ids)
    return LintReport(
        entries=tuple(entries),
        unmatched_strings=tuple(unmatched),
        unused_rule_ids=unused,
    )
