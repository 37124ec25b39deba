"""Concrete schedule plans: intake times, recurrence intervals, counts.

Everything here is floating local time (no timezone): medication times follow
the patient's clock. The anchor date is always injected by the caller; the
library never reads a wall clock.
"""

from __future__ import annotations

import calendar
import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import date, datetime, time, timedelta
from fractions import Fraction

from .catalog import FrequencyUnit, TimeOfDay
from .errors import MalformedInput, ScheduleError
from .interpret import ScheduleParameters

DEFAULT_SUMMARY = "medication reminder"

_DEFAULT_TIME_OF_DAY_MAP = {
    TimeOfDay.MORNING: time(8, 0),
    TimeOfDay.MIDDAY: time(12, 0),
    TimeOfDay.AFTERNOON: time(16, 0),
    TimeOfDay.EVENING: time(20, 0),
}


@dataclass(frozen=True)
class TimeDefaults:
    """Configuration mapping schedule parameters onto wall-clock times."""

    time_of_day_map: dict[TimeOfDay, time] = field(
        default_factory=_DEFAULT_TIME_OF_DAY_MAP.copy
    )
    waking_window: tuple[time, time] = (time(8, 0), time(20, 0))
    default_horizon_days: int = 30
    max_daily_intakes: int = 12

    def __post_init__(self):
        if set(self.time_of_day_map) != set(TimeOfDay):
            raise ValueError("time_of_day_map must cover all four times of day")
        if self.waking_window[0] >= self.waking_window[1]:
            raise ValueError("waking window must be non-empty")
        if self.default_horizon_days < 1 or self.max_daily_intakes < 1:
            raise ValueError("horizon and intake cap must be at least 1")


def _parse_clock(value, what: str) -> time:
    if not isinstance(value, str):
        raise MalformedInput(f"{what} must be an HH:MM string")
    try:
        hour, minute = value.split(":")
        return time(int(hour), int(minute))
    except (ValueError, TypeError) as exc:
        raise MalformedInput(f"{what} must be an HH:MM string: {value!r}") from exc


def load_time_defaults(raw: bytes | str) -> TimeDefaults:
    """Parse a time-defaults configuration document (all keys optional)."""
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput("time defaults must be a JSON object")
    allowed = {"time_of_day_map", "waking_window", "default_horizon_days", "max_daily_intakes"}
    unknown = set(doc) - allowed
    if unknown:
        raise MalformedInput(f"unknown time-defaults field(s): {', '.join(sorted(unknown))}")

    defaults = TimeDefaults()
    tod_map = dict(defaults.time_of_day_map)
    if "time_of_day_map" in doc:
        raw_map = doc["time_of_day_map"]
        if not isinstance(raw_map, dict):
            raise MalformedInput("time_of_day_map must be an object")
        for key, value in raw_map.items():
            try:
                tod = TimeOfDay(key)
            except ValueError:
                raise MalformedInput(f"unknown time of day {key!r}") from None
            tod_map[tod] = _parse_clock(value, f"time_of_day_map[{key}]")
    window = defaults.waking_window
    if "waking_window" in doc:
        raw_window = doc["waking_window"]
        if not isinstance(raw_window, list) or len(raw_window) != 2:
            raise MalformedInput("waking_window must be a [start, end] pair")
        window = (
            _parse_clock(raw_window[0], "waking_window start"),
            _parse_clock(raw_window[1], "waking_window end"),
        )
    horizon = doc.get("default_horizon_days", defaults.default_horizon_days)
    cap = doc.get("max_daily_intakes", defaults.max_daily_intakes)
    for name, value in (("default_horizon_days", horizon), ("max_daily_intakes", cap)):
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise MalformedInput(f"{name} must be a positive integer")
    try:
        return TimeDefaults(
            time_of_day_map=tod_map,
            waking_window=window,
            default_horizon_days=horizon,
            max_daily_intakes=cap,
        )
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc


@dataclass(frozen=True)
class EventSeries:
    """One repeating event: a fixed clock time recurring at a fixed interval."""

    series_index: int
    first_occurrence: datetime
    interval_days: int | None
    interval_hours: int | None
    count: int
    summary: str = DEFAULT_SUMMARY

    def __post_init__(self):
        if self.series_index < 0:
            raise ValueError("series_index must be >= 0")
        if (self.interval_days is None) == (self.interval_hours is None):
            raise ValueError("exactly one of interval_days/interval_hours must be set")
        interval = self.interval_days if self.interval_days is not None else self.interval_hours
        if interval < 1:
            raise ValueError("interval must be >= 1")
        if self.count < 1:
            raise ValueError("count must be >= 1")


@dataclass(frozen=True)
class SchedulePlan:
    """A complete reminder plan: one or more event series plus identity."""

    series: tuple[EventSeries, ...]
    uid_seed: str
    anchor_date: date

    def __post_init__(self):
        if not self.series:
            raise ValueError("plan needs at least one series")
        if [s.series_index for s in self.series] != list(range(len(self.series))):
            raise ValueError("series indices must be 0..n-1 without gaps")


def _daily_rate(params: ScheduleParameters) -> Fraction:
    """Intakes per day implied by the frequency, regardless of its unit."""
    if params.frequency_unit is FrequencyUnit.HOURS:
        return params.frequency * 24
    if params.frequency_unit is FrequencyUnit.DAYS:
        return params.frequency
    if params.frequency_unit is FrequencyUnit.WEEKS:
        return params.frequency / 7
    raise ScheduleError(
        "monthly intake frequencies are not supported; rephrase the rule in days or weeks"
    )


def resolve_times(params: ScheduleParameters, cfg: TimeDefaults = TimeDefaults()) -> list[time]:
    """Map schedule parameters to the daily wall-clock intake times.

    Explicit time-of-day words win. Otherwise the daily intake count is spread
    evenly through the waking window. Hourly regimens start at the window
    start and run on their own clock.
    """
    rate = _daily_rate(params)
    if rate > cfg.max_daily_intakes:
        raise ScheduleError(
            f"frequency implies {rate} intakes per day, above the configured "
            f"maximum of {cfg.max_daily_intakes}"
        )
    if params.time_of_days:
        return sorted({cfg.time_of_day_map[t] for t in params.time_of_days})

    start, end = cfg.waking_window
    if params.frequency_unit is FrequencyUnit.HOURS:
        return [start]
    if rate <= 1:
        k = 1
    else:
        if rate.denominator != 1:
            raise ScheduleError(
                f"{params.frequency} per {params.frequency_unit.value} does not "
                "give a whole number of intakes per day"
            )
        k = int(rate)
    if k == 1:
        return [start]
    start_min = start.hour * 60 + start.minute
    span = (end.hour * 60 + end.minute) - start_min
    slots = [start_min + (i * span) // (k - 1) for i in range(k)]
    return [time(m // 60, m % 60) for m in slots]


def _add_months(day: date, months: int) -> date:
    month_index = day.month - 1 + months
    year = day.year + month_index // 12
    month = month_index % 12 + 1
    return date(year, month, min(day.day, calendar.monthrange(year, month)[1]))


def _horizon_days(params: ScheduleParameters, anchor_date: date, cfg: TimeDefaults) -> int:
    if params.duration is None:
        return cfg.default_horizon_days
    if params.duration_unit.value == "days":
        return params.duration
    if params.duration_unit.value == "weeks":
        return params.duration * 7
    # months: calendar-aware, clamping to month ends (Jan 31 + 1 month = Feb 28/29)
    return (_add_months(anchor_date, params.duration) - anchor_date).days


def uid_seed_for(label_text: str, anchor_date: date) -> str:
    """Deterministic plan identity: same label text and anchor, same seed."""
    digest = hashlib.sha256(f"{label_text}|{anchor_date.isoformat()}".encode("utf-8"))
    return digest.hexdigest()[:16]


def build_schedule(
    params: ScheduleParameters,
    anchor_date: date,
    cfg: TimeDefaults = TimeDefaults(),
    label_text: str = "",
    summary: str = DEFAULT_SUMMARY,
) -> SchedulePlan:
    """Turn schedule parameters into a concrete event plan.

    One series per resolved daily time; series recur every interval_days with
    a fixed occurrence count covering the duration horizon (the configured
    default horizon for open-ended prescriptions). Whole-hour regimens become
    a single series on an hourly interval.
    """
    times = resolve_times(params, cfg)
    horizon = _horizon_days(params, anchor_date, cfg)
    seed = uid_seed_for(label_text, anchor_date)

    if params.frequency_unit is FrequencyUnit.HOURS:
        step = Fraction(1, 1) / params.frequency
        if step.denominator != 1:
            raise ScheduleError(
                f"{params.frequency} per hour does not reduce to a whole-hour interval"
            )
        interval_hours = int(step)
        first = datetime.combine(anchor_date, times[0])
        horizon_end = datetime.combine(anchor_date + timedelta(days=horizon), time(0, 0))
        delta_seconds = int((horizon_end - first).total_seconds())
        if delta_seconds <= 0:
            raise ScheduleError("horizon ends before the first intake time")
        count = -(-delta_seconds // (interval_hours * 3600))
        series = (
            EventSeries(
                series_index=0,
                first_occurrence=first,
                interval_days=None,
                interval_hours=interval_hours,
                count=count,
                summary=summary,
            ),
        )
        return SchedulePlan(series=series, uid_seed=seed, anchor_date=anchor_date)

    rate = _daily_rate(params)
    if rate <= 1:
        step = Fraction(1, 1) / rate
        if step.denominator != 1:
            raise ScheduleError(
                f"{params.frequency} per {params.frequency_unit.value} does not "
                "reduce to a whole-day interval"
            )
        interval_days = int(step)
    else:
        interval_days = 1
    count = -(-horizon // interval_days)
    series = tuple(
        EventSeries(
            series_index=i,
            first_occurrence=datetime.combine(anchor_date, t),
            interval_days=interval_days,
            interval_hours=None,
            count=count,
            summary=summary,
        )
        for i, t in enumerate(times)
    )
    return SchedulePlan(series=series, uid_seed=seed, anchor_date=anchor_date)


def expand_occurrences(plan: SchedulePlan) -> list[datetime]:
    """The exact multiset of occurrence timestamps, sorted ascending."""
    out: list[datetime] = []
    for s in plan.series:
        if s.interval_days is not None:
            step = timedelta(days=s.interval_days)
        else:
            step = timedelta(hours=s.interval_hours)
        out.extend(s.first_occurrence + i * step for i in range(s.count))
    out.sort()
    return out


def with_horizon(cfg: TimeDefaults, horizon_days: int | None) -> TimeDefaults:
    """Copy cfg with an overridden open-ended-prescription horizon."""
    if horizon_days is None:
        return cfg
    if horizon_days < 1:
        raise ScheduleError("horizon must be at least 1 day")
    return replace(cfg, default_horizon_days=horizon_days)
