"""Shared test fixtures and independent brute-force oracles.

The oracles deliberately re-derive behavior from first principles (iterative
set merging, day-by-day walks) instead of calling into the package, so that
they can catch implementation bugs.
"""

from __future__ import annotations

from datetime import date, datetime, time, timedelta
from fractions import Fraction
from pathlib import Path

from memorais import (
    FrequencyUnit,
    OcrDocument,
    OcrFragment,
    OrderingParams,
    Quad,
    ScheduleParameters,
    TimeDefaults,
)

DATA_DIR = Path(__file__).parent / "data"


def box_quad(x1: float, y1: float, x2: float, y2: float) -> Quad:
    return Quad(((x1, y1), (x2, y1), (x2, y2), (x1, y2)))


def frag(text: str, x1: float, y1: float, x2: float, y2: float, conf: float = 0.9) -> OcrFragment:
    return OcrFragment(text=text, quad=box_quad(x1, y1, x2, y2), confidence=conf)


def doc_of(*fragments: OcrFragment) -> OcrDocument:
    return OcrDocument(fragments=tuple(fragments))


def oracle_reading_order(doc: OcrDocument, params: OrderingParams = OrderingParams()):
    """Brute-force reading order: merge line groups to a fixpoint, then sort.

    Two fragments share a line iff the vertical overlap of their bounding
    rectangles is at least line_overlap_fraction of the shorter rectangle's
    height; lines are the transitive closure of that relation.
    """
    indexed = [
        (i, f) for i, f in enumerate(doc.fragments) if f.confidence >= params.min_confidence
    ]
    bounds = {i: f.quad.bounds() for i, f in indexed}

    def share_line(i, j):
        a, b = bounds[i], bounds[j]
        overlap = min(a[3], b[3]) - max(a[1], b[1])
        shorter = min(a[3] - a[1], b[3] - b[1])
        return overlap >= params.line_overlap_fraction * shorter

    groups = [{i} for i, _ in indexed]
    merged = True
    while merged:
        merged = False
        for gi in range(len(groups)):
            for gj in range(gi + 1, len(groups)):
                if any(share_line(i, j) for i in groups[gi] for j in groups[gj]):
                    groups[gi] |= groups[gj]
                    del groups[gj]
                    merged = True
                    break
            if merged:
                break

    groups.sort(key=lambda g: (min(bounds[i][1] for i in g), min(g)))
    order = []
    for g in groups:
        order.extend(sorted(g, key=lambda i: (bounds[i][0], i)))
    return [doc.fragments[i] for i in order]


def oracle_daily_times(params: ScheduleParameters, cfg: TimeDefaults) -> list[time]:
    """Which wall-clock times does a (non-hourly) intake day carry."""
    if params.time_of_days:
        return sorted({cfg.time_of_day_map[t] for t in params.time_of_days})
    start, end = cfg.waking_window
    rate = oracle_daily_rate(params)
    if params.frequency_unit is FrequencyUnit.HOURS or rate <= 1:
        return [start]
    k = int(rate)
    start_min = start.hour * 60 + start.minute
    span = end.hour * 60 + end.minute - start_min
    return [time((start_min + i * span // (k - 1)) // 60, (start_min + i * span // (k - 1)) % 60) for i in range(k)]


def oracle_daily_rate(params: ScheduleParameters) -> Fraction:
    factor = {
        FrequencyUnit.HOURS: Fraction(24),
        FrequencyUnit.DAYS: Fraction(1),
        FrequencyUnit.WEEKS: Fraction(1, 7),
    }[params.frequency_unit]
    return params.frequency * factor


def oracle_occurrences(
    params: ScheduleParameters,
    anchor: date,
    cfg: TimeDefaults = TimeDefaults(),
) -> list[datetime]:
    """Day-walking occurrence oracle.

    Walks every day of the horizon asking "is this an intake day?" and "which
    times?", or for hourly regimens walks every hour slot of every day asking
    whether it falls on the interval grid. Assumes parameters are schedulable.
    """
    horizon_days = params.duration if params.duration is not None else cfg.default_horizon_days
    if params.duration is not None:
        assert params.duration_unit.value == "days", "oracle handles day durations only"
    times = oracle_daily_times(params, cfg)
    out: list[datetime] = []

    if params.frequency_unit is FrequencyUnit.HOURS:
        step_hours = int(Fraction(1) / params.frequency)
        first = datetime.combine(anchor, times[0])
        end = datetime.combine(anchor + timedelta(days=horizon_days), time(0, 0))
        for day_index in range(horizon_days + 1):
            day = anchor + timedelta(days=day_index)
            for hour in range(24):
                candidate = datetime.combine(day, time(hour, times[0].minute))
                if candidate < first or candidate >= end:
                    continue
                if (candidate - first) % timedelta(hours=step_hours) == timedelta(0):
                    out.append(candidate)
        return sorted(out)

    rate = oracle_daily_rate(params)
    interval = int(Fraction(1) / rate) if rate <= 1 else 1
    for day_index in range(horizon_days):
        if day_index % interval == 0:
            day = anchor + timedelta(days=day_index)
            out.extend(datetime.combine(day, t) for t in times)
    return sorted(out)
