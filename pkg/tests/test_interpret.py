"""Interpreter: catalog application, audit trail, failure honesty."""

from fractions import Fraction

import pytest

from memorais import (
    DurationUnit,
    FrequencyUnit,
    InterpretationFailure,
    Rule,
    RuleKind,
    Ruleset,
    TimeOfDay,
    interpret,
    label_from_text,
    params_from_json,
    params_to_json,
)


def _freq_rule(rule_id, pattern, num, den=1, times=()):
    return Rule(
        id=rule_id,
        kind=RuleKind.FREQUENCY,
        pattern=pattern,
        frequency=Fraction(num, den),
        frequency_unit=FrequencyUnit.DAYS,
        time_of_days=times,
    )


def test_every_other_day(rules):
    params = interpret(label_from_text("take 1 tablet every other day"), rules)
    assert params.frequency == Fraction(1, 2)
    assert params.frequency_unit is FrequencyUnit.DAYS
    assert params.duration is None
    assert params.duration_unit is None
    assert params.time_of_days == ()


def test_every_night_sets_evening(rules):
    params = interpret(label_from_text("every night"), rules)
    assert params.frequency == Fraction(1)
    assert params.frequency_unit is FrequencyUnit.DAYS
    assert params.time_of_days == (TimeOfDay.EVENING,)


def test_frequency_plus_duration(rules):
    label = label_from_text("take 2 tablets twice per day for 10 days")
    params = interpret(label, rules)
    assert params.frequency == Fraction(2)
    assert params.frequency_unit is FrequencyUnit.DAYS
    assert params.duration == 10
    assert params.duration_unit is DurationUnit.DAYS
    matched = {m.rule_id for m in params.matches}
    assert matched == {"twice-per-day", "for-n-days"}
    for m in params.matches:
        snippet = label.text[m.start : m.end]
        assert snippet in ("twice per day", "for 10 days")


def test_no_frequency_indicator_fails(rules):
    with pytest.raises(InterpretationFailure) as exc_info:
        interpret(label_from_text("shake well before use"), rules)
    assert exc_info.value.normalized_text == "shake well before use"
    assert exc_info.value.partial_matches == ()


def test_duration_alone_fails_but_carries_partial_matches(rules):
    with pytest.raises(InterpretationFailure) as exc_info:
        interpret(label_from_text("for 7 days"), rules)
    assert [m.rule_id for m in exc_info.value.partial_matches] == ["for-n-days"]


def test_last_match_wins_between_two_frequency_rules():
    rs = Ruleset(
        rules=(
            _freq_rule("one-a-day", "blue pill", 1),
            _freq_rule("two-a-day", "pill", 2),
        ),
        version="t",
    )
    params = interpret(label_from_text("take the blue pill"), rs)
    assert params.frequency == Fraction(2)
    assert [m.rule_id for m in params.matches] == ["one-a-day", "two-a-day"]

    reversed_rs = Ruleset(rules=tuple(reversed(rs.rules)), version="t")
    params = interpret(label_from_text("take the blue pill"), reversed_rs)
    assert params.frequency == Fraction(1)


def test_time_of_days_accumulate_as_a_union(rules):
    params = interpret(label_from_text("take 1 every morning and every night"), rules)
    assert params.time_of_days == (TimeOfDay.MORNING, TimeOfDay.EVENING)
    assert params.frequency == Fraction(1)


def test_later_duration_match_wins(rules):
    params = interpret(label_from_text("take daily for 3 days then for 5 days"), rules)
    # both matches belong to the same rule; the rightmost write survives
    assert params.duration == 5


def test_interpret_is_pure(rules):
    label = label_from_text("take 1 tablet twice per day")
    assert interpret(label, rules) == interpret(label, rules)


def test_unmatched_rule_does_not_change_output(rules):
    label = label_from_text("take 1 tablet twice per day")
    base = interpret(label, rules)
    extended = Ruleset(
        rules=rules.rules + (_freq_rule("never-fires", "unicorn dust", 9),),
        version=rules.version,
    )
    assert interpret(label, extended) == base


def test_audit_completeness(rules):
    label = label_from_text("take 2 tablets every night for 10 days")
    params = interpret(label, rules)
    matched_rules = {m.rule_id: rules.rules[[r.id for r in rules.rules].index(m.rule_id)] for m in params.matches}
    freq_writers = [r for r in matched_rules.values() if r.kind is RuleKind.FREQUENCY]
    dur_writers = [r for r in matched_rules.values() if r.kind is RuleKind.DURATION]
    assert any(r.frequency == params.frequency for r in freq_writers)
    assert any(r.duration_unit == params.duration_unit for r in dur_writers)
    assert any(set(params.time_of_days) <= set(r.time_of_days) for r in freq_writers)


def test_params_json_round_trip(rules):
    label = label_from_text("take 2 tablets twice per day for 10 days")
    params = interpret(label, rules)
    blob = params_to_json(params, label.text)
    restored, text = params_from_json(blob)
    assert restored == params
    assert text == label.text


def test_params_json_has_documented_shape(rules):
    import json

    label = label_from_text("every other day")
    blob = params_to_json(interpret(label, rules), label.text)
    doc = json.loads(blob)
    assert doc["frequency"] == {"num": 1, "den": 2}
    assert doc["frequency_unit"] == "days"
    assert doc["duration"] is None
    assert doc["duration_unit"] is None
    assert doc["time_of_days"] == []
    assert doc["matches"][0]["rule_id"] == "every-other-day"
