"""iCalendar serialization of schedule plans, plus a roundtrip re-parser.

The emitter is a deliberate minimal producer: VCALENDAR/VEVENT/VALARM with
floating local DTSTART values and COUNT-terminated RRULEs, byte-deterministic
for fixed inputs. The re-parser checks emitted documents through an external
recurrence engine (dateutil) so emitter bugs cannot hide behind shared code.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

from dateutil.rrule import rrulestr

from .errors import EmitError, ParseError
from .schedule import DEFAULT_SUMMARY, SchedulePlan

_MAX_OCTETS = 75
_UID_DOMAIN = "memorais"


@dataclass(frozen=True)
class CalendarMeta:
    """Emitter inputs that are not part of the plan.

    dtstamp is injected by the caller (the CLI and service supply "now" at
    their edges) so that library output stays reproducible.
    """

    dtstamp: datetime
    prodid: str = "-//memorais//reminder-engine 0.1//EN"
    summary: str = ""


@dataclass(frozen=True)
class IcsDocument:
    """Serialized calendar octets plus the event UIDs they contain."""

    data: bytes
    uid_list: tuple[str, ...]


def escape_text(value: str) -> str:
    """Escape a TEXT property value (backslash, semicolon, comma, newlines)."""
    value = value.replace("\\", "\\\\")
    value = value.replace(";", "\\;").replace(",", "\\,")
    value = value.replace("\r\n", "\n").replace("\r", "\n").replace("\n", "\\n")
    return value


def fold_line(line: str) -> list[str]:
    """Split one logical content line into physical lines of <= 75 octets.

    Continuations start with a single space and the split never lands inside
    a multi-byte UTF-8 sequence.
    """
    raw = line.encode("utf-8")
    if len(raw) <= _MAX_OCTETS:
        return [line]
    chunks = []
    start = 0
    budget = _MAX_OCTETS
    while start < len(raw):
        take = min(budget, len(raw) - start)
        while take > 0 and start + take < len(raw) and (raw[start + take] & 0xC0) == 0x80:
            take -= 1
        if take == 0:
            raise EmitError("cannot fold line: continuation budget too small")
        chunks.append(raw[start : start + take])
        start += take
        budget = _MAX_OCTETS - 1  # one octet goes to the leading space
    return [chunks[0].decode("utf-8")] + [" " + c.decode("utf-8") for c in chunks[1:]]


def _format_local(dt: datetime) -> str:
    return dt.strftime("%Y%m%dT%H%M%S")


def _format_utc(dt: datetime) -> str:
    if dt.tzinfo is not None:
        dt = dt.astimezone(timezone.utc).replace(tzinfo=None)
    return dt.strftime("%Y%m%dT%H%M%SZ")


def _rrule_value(series) -> str:
    if series.interval_days is not None:
        freq, interval = "DAILY", series.interval_days
    else:
        freq, interval = "HOURLY", series.interval_hours
    parts = [f"FREQ={freq}"]
    if interval != 1:
        parts.append(f"INTERVAL={interval}")
    parts.append(f"COUNT={series.count}")
    return ";".join(parts)


def _validate_plan(plan: SchedulePlan) -> None:
    if not plan.series:
        raise EmitError("plan has no event series")
    if [s.series_index for s in plan.series] != list(range(len(plan.series))):
        raise EmitError("series indices are not 0..n-1")
    if not plan.uid_seed:
        raise EmitError("plan has no uid seed")
    for s in plan.series:
        if s.count < 1:
            raise EmitError(f"series {s.series_index} has count {s.count}")
        if (s.interval_days is None) == (s.interval_hours is None):
            raise EmitError(f"series {s.series_index} has ambiguous interval")


def emit_ics(plan: SchedulePlan, meta: CalendarMeta) -> IcsDocument:
    """Serialize a plan to a deterministic RFC 5545 document.

    UIDs are uid_seed plus the series index, so re-running the pipeline on the
    same label and anchor date re-issues the same UIDs and a conforming
    calendar client overwrites the old events instead of duplicating them.
    """
    _validate_plan(plan)
    dtstamp = _format_utc(meta.dtstamp)
    lines = ["BEGIN:VCALENDAR", "VERSION:2.0", f"PRODID:{escape_text(meta.prodid)}"]
    uids = []
    for series in plan.series:
        uid = f"{plan.uid_seed}-{series.series_index}@{_UID_DOMAIN}"
        uids.append(uid)
        summary = meta.summary or series.summary or DEFAULT_SUMMARY
        lines += [
            "BEGIN:VEVENT",
            f"UID:{uid}",
            f"DTSTAMP:{dtstamp}",
            f"DTSTART:{_format_local(series.first_occurrence)}",
            f"SUMMARY:{escape_text(summary)}",
            f"RRULE:{_rrule_value(series)}",
            "BEGIN:VALARM",
            "ACTION:DISPLAY",
            f"DESCRIPTION:{escape_text(summary)}",
            "TRIGGER:PT0S",
            "END:VALARM",
            "END:VEVENT",
        ]
    lines.append("END:VCALENDAR")

    physical: list[str] = []
    for line in lines:
        physical.extend(fold_line(line))
    data = ("\r\n".join(physical) + "\r\n").encode("utf-8")
    return IcsDocument(data=data, uid_list=tuple(uids))


def unfold_lines(data: bytes) -> list[str]:
    """Undo CRLF line folding, returning logical content lines."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"document is not UTF-8: {exc}") from exc
    if not text.endswith("\r\n"):
        raise ParseError("document does not end with CRLF")
    merged: list[str] = []
    for line in text[:-2].split("\r\n"):
        if line[:1] in (" ", "\t"):
            if not merged:
                raise ParseError("continuation line with nothing to continue")
            merged[-1] += line[1:]
        else:
            merged.append(line)
    return merged


def parse_ics_roundtrip(doc: IcsDocument) -> list[datetime]:
    """Re-parse an emitted document and expand its recurrences.

    Expansion goes through dateutil's recurrence engine, independent of the
    scheduler's own arithmetic; the result must equal expand_occurrences of
    the plan the document was emitted from.
    """
    lines = unfold_lines(doc.data)
    if not lines or lines[0] != "BEGIN:VCALENDAR" or lines[-1] != "END:VCALENDAR":
        raise ParseError("document is not a VCALENDAR")

    occurrences: list[datetime] = []
    in_event = False
    in_alarm = False
    dtstart: str | None = None
    rrule: str | None = None
    for line in lines[1:-1]:
        if line == "BEGIN:VEVENT":
            if in_event:
                raise ParseError("nested VEVENT")
            in_event, dtstart, rrule = True, None, None
            continue
        if line == "END:VEVENT":
            if not in_event or in_alarm:
                raise ParseError("unbalanced VEVENT/VALARM")
            if dtstart is None or rrule is None:
                raise ParseError("VEVENT missing DTSTART or RRULE")
            try:
                expansion = rrulestr(f"DTSTART:{dtstart}\nRRULE:{rrule}")
                occurrences.extend(expansion)
            except (ValueError, TypeError) as exc:
                raise ParseError(f"recurrence did not parse: {exc}") from exc
            in_event = False
            continue
        if line == "BEGIN:VALARM":
            if not in_event or in_alarm:
                raise ParseError("VALARM outside VEVENT")
            in_alarm = True
            continue
        if line == "END:VALARM":
            if not in_alarm:
                raise ParseError("unbalanced VALARM")
            in_alarm = False
            continue
        if in_event and not in_alarm:
            name, _, value = line.partition(":")
            if name == "DTSTART":
                dtstart = value
            elif name == "RRULE":
                rrule = value
    if in_event:
        raise ParseError("unterminated VEVENT")
    occurrences.sort()
    return occurrences
