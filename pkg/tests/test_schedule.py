"""Scheduler: time resolution, plan building, occurrence expansion."""

import random
from datetime import date, datetime, time
from fractions import Fraction

import pytest

from memorais import (
    DurationUnit,
    EventSeries,
    FrequencyUnit,
    ScheduleError,
    ScheduleParameters,
    SchedulePlan,
    TimeDefaults,
    TimeOfDay,
    build_schedule,
    expand_occurrences,
    load_time_defaults,
    resolve_times,
    uid_seed_for,
)
from helpers import oracle_occurrences

ANCHOR = date(2024, 1, 1)


def params_of(num, den=1, unit=FrequencyUnit.DAYS, duration=None, duration_unit=None, times=()):
    return ScheduleParameters(
        frequency=Fraction(num, den),
        frequency_unit=unit,
        duration=duration,
        duration_unit=DurationUnit(duration_unit) if duration_unit else None,
        time_of_days=times,
    )


def test_time_of_day_words_map_to_clock_times(defaults):
    params = params_of(1, times=(TimeOfDay.EVENING,))
    assert resolve_times(params, defaults) == [time(20, 0)]


def test_times_of_day_deduplicate_and_sort(defaults):
    params = params_of(1, times=(TimeOfDay.EVENING, TimeOfDay.MORNING, TimeOfDay.EVENING))
    assert resolve_times(params, defaults) == [time(8, 0), time(20, 0)]


def test_twice_daily_spreads_to_window_endpoints(defaults):
    assert resolve_times(params_of(2), defaults) == [time(8, 0), time(20, 0)]


def test_three_times_daily_spreads_evenly(defaults):
    assert resolve_times(params_of(3), defaults) == [time(8, 0), time(14, 0), time(20, 0)]


def test_sub_daily_frequency_gets_one_slot(defaults):
    assert resolve_times(params_of(1, 2), defaults) == [time(8, 0)]


def test_hourly_regimen_uses_window_start(defaults):
    assert resolve_times(params_of(1, 6, unit=FrequencyUnit.HOURS), defaults) == [time(8, 0)]


def test_too_many_daily_intakes_is_an_error(defaults):
    with pytest.raises(ScheduleError):
        resolve_times(params_of(13), defaults)
    with pytest.raises(ScheduleError):
        # every hour implies 24 intakes per day
        resolve_times(params_of(1, 1, unit=FrequencyUnit.HOURS), defaults)


def test_twice_daily_for_ten_days(defaults):
    plan = build_schedule(params_of(2, duration=10, duration_unit="days"), ANCHOR, defaults)
    assert len(plan.series) == 2
    assert all(s.interval_days == 1 and s.count == 10 for s in plan.series)
    occurrences = expand_occurrences(plan)
    assert len(occurrences) == 20
    assert occurrences == oracle_occurrences(
        params_of(2, duration=10, duration_unit="days"), ANCHOR, defaults
    )


def test_every_other_day_open_ended(defaults):
    plan = build_schedule(params_of(1, 2), ANCHOR, defaults)
    assert len(plan.series) == 1
    series = plan.series[0]
    assert series.interval_days == 2
    assert series.count == 15  # 30-day default horizon
    assert expand_occurrences(plan) == oracle_occurrences(params_of(1, 2), ANCHOR, defaults)


def test_single_occurrence_degenerate_case(defaults):
    plan = build_schedule(params_of(1, duration=1, duration_unit="days"), ANCHOR, defaults)
    assert len(plan.series) == 1
    assert plan.series[0].count == 1
    assert plan.series[0].first_occurrence == datetime(2024, 1, 1, 8, 0)


def test_expansion_is_an_arithmetic_progression():
    series = EventSeries(
        series_index=0,
        first_occurrence=datetime(2024, 1, 1, 8, 0),
        interval_days=2,
        interval_hours=None,
        count=3,
    )
    plan = SchedulePlan(series=(series,), uid_seed="abc", anchor_date=ANCHOR)
    assert expand_occurrences(plan) == [
        datetime(2024, 1, 1, 8, 0),
        datetime(2024, 1, 3, 8, 0),
        datetime(2024, 1, 5, 8, 0),
    ]


def test_open_ended_horizon_bound(defaults):
    plan = build_schedule(params_of(1), ANCHOR, defaults)
    last = expand_occurrences(plan)[-1]
    assert last < datetime(2024, 1, 31, 0, 0)


def test_hourly_regimen_crosses_midnight(defaults):
    params = params_of(1, 6, unit=FrequencyUnit.HOURS, duration=2, duration_unit="days")
    plan = build_schedule(params, ANCHOR, defaults)
    occurrences = expand_occurrences(plan)
    assert occurrences[0] == datetime(2024, 1, 1, 8, 0)
    assert datetime(2024, 1, 2, 2, 0) in occurrences
    assert occurrences == oracle_occurrences(params, ANCHOR, defaults)


def test_weekly_reduces_to_seven_day_interval(defaults):
    plan = build_schedule(params_of(1, unit=FrequencyUnit.WEEKS), ANCHOR, defaults)
    assert plan.series[0].interval_days == 7
    assert plan.series[0].count == 5  # days 0, 7, 14, 21, 28 inside 30


def test_twice_weekly_is_rejected(defaults):
    with pytest.raises(ScheduleError):
        build_schedule(params_of(2, unit=FrequencyUnit.WEEKS), ANCHOR, defaults)


def test_monthly_frequency_is_rejected(defaults):
    with pytest.raises(ScheduleError):
        build_schedule(params_of(1, unit=FrequencyUnit.MONTHS), ANCHOR, defaults)


def test_fractional_daily_rate_above_one_is_rejected(defaults):
    with pytest.raises(ScheduleError):
        build_schedule(params_of(3, 2), ANCHOR, defaults)


def test_week_duration_converts_to_days(defaults):
    plan = build_schedule(params_of(1, duration=2, duration_unit="weeks"), ANCHOR, defaults)
    assert plan.series[0].count == 14


def test_month_duration_is_calendar_aware(defaults):
    # 2024-01-01 plus 2 months is 2024-03-01: 31 + 29 = 60 days (leap year)
    plan = build_schedule(params_of(1, duration=2, duration_unit="months"), ANCHOR, defaults)
    assert plan.series[0].count == 60
    # end-of-month clamp: 2024-01-31 plus 1 month is 2024-02-29, 29 days out
    plan = build_schedule(
        params_of(1, duration=1, duration_unit="months"), date(2024, 1, 31), defaults
    )
    assert plan.series[0].count == 29


def test_uid_seed_is_deterministic(defaults):
    a = build_schedule(params_of(2), ANCHOR, defaults, label_text="twice per day")
    b = build_schedule(params_of(2), ANCHOR, defaults, label_text="twice per day")
    assert a == b
    assert a.uid_seed == uid_seed_for("twice per day", ANCHOR)
    c = build_schedule(params_of(2), ANCHOR, defaults, label_text="other label")
    assert c.uid_seed != a.uid_seed
    d = build_schedule(params_of(2), date(2024, 1, 2), defaults, label_text="twice per day")
    assert d.uid_seed != a.uid_seed


def test_no_occurrence_precedes_first_resolved_time(defaults):
    for params in (params_of(3), params_of(1, 8, unit=FrequencyUnit.HOURS)):
        plan = build_schedule(params, ANCHOR, defaults)
        first = expand_occurrences(plan)[0]
        assert first == plan.series[0].first_occurrence
        assert first.date() == ANCHOR


def test_randomized_plans_match_day_walking_oracle(defaults):
    rng = random.Random(20240101)
    day_freqs = [(1, 3), (1, 2), (1, 1), (2, 1), (3, 1), (4, 1)]
    hour_intervals = [6, 8, 12]
    for _ in range(300):
        if rng.random() < 0.75:
            num, den = rng.choice(day_freqs)
            params = params_of(num, den)
        else:
            params = params_of(1, rng.choice(hour_intervals), unit=FrequencyUnit.HOURS)
        if rng.random() < 0.5:
            duration = rng.randint(1, 60)
            params = ScheduleParameters(
                frequency=params.frequency,
                frequency_unit=params.frequency_unit,
                duration=duration,
                duration_unit=DurationUnit.DAYS,
                time_of_days=params.time_of_days,
            )
        anchor = date(2024, rng.randint(1, 12), rng.randint(1, 28))
        plan = build_schedule(params, anchor, defaults)
        assert expand_occurrences(plan) == oracle_occurrences(params, anchor, defaults)
        total = sum(s.count for s in plan.series)
        assert total == len(oracle_occurrences(params, anchor, defaults))


def test_time_defaults_load_and_validate():
    cfg = load_time_defaults(
        b'{"time_of_day_map": {"morning": "07:30"}, "waking_window": ["07:00", "21:00"],'
        b' "default_horizon_days": 14, "max_daily_intakes": 6}'
    )
    assert cfg.time_of_day_map[TimeOfDay.MORNING] == time(7, 30)
    assert cfg.time_of_day_map[TimeOfDay.EVENING] == time(20, 0)  # default retained
    assert cfg.waking_window == (time(7, 0), time(21, 0))
    assert cfg.default_horizon_days == 14

    from memorais import MalformedInput

    for bad in (
        b"not json",
        b'{"waking_window": ["21:00", "07:00"]}',
        b'{"default_horizon_days": 0}',
        b'{"time_of_day_map": {"brunch": "11:00"}}',
        b'{"surprise": 1}',
    ):
        with pytest.raises(MalformedInput):
            load_time_defaults(bad)
