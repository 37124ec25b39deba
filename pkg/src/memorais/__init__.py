"""memorais: prescription-label OCR output to configured calendar reminders.

Pipeline stages, each usable on its own:

1. ocr: parse structured OCR results, rebuild human reading order.
2. textnorm: lowercase, number words to digits, whitespace collapse.
3. catalog / interpret: data-driven indicator rules to schedule parameters.
4. schedule: concrete event series with intervals, counts and clock times.
5. ics: deterministic RFC 5545 serialization plus a roundtrip re-parser.
"""

from .catalog import (
    DurationUnit,
    FrequencyUnit,
    LintEntry,
    LintReport,
    Rule,
    RuleKind,
    Ruleset,
    TimeOfDay,
    default_ruleset,
    lint_ruleset,
    load_ruleset,
    serialize_ruleset,
)
from .errors import (
    CatalogError,
    EmitError,
    InterpretationFailure,
    MalformedInput,
    MemoraisError,
    ParseError,
    ScheduleError,
)
from .ics import CalendarMeta, IcsDocument, emit_ics, parse_ics_roundtrip
from .interpret import RuleMatch, ScheduleParameters, interpret, params_from_json, params_to_json
from .ocr import (
    OcrDocument,
    OcrFormat,
    OcrFragment,
    OrderingParams,
    Quad,
    parse_ocr_document,
    reading_order,
)
from .pipeline import label_from_ocr, label_from_text, plan_from_label, run_pipeline
from .schedule import (
    EventSeries,
    SchedulePlan,
    TimeDefaults,
    build_schedule,
    expand_occurrences,
    load_time_defaults,
    resolve_times,
    uid_seed_for,
)
from .textnorm import LabelText, Span, normalize, normalize_texts

__version__ = "0.1.0"

__all__ = [
    "CalendarMeta",
    "CatalogError",
    "DurationUnit",
    "EmitError",
    "EventSeries",
    "FrequencyUnit",
    "IcsDocument",
    "InterpretationFailure",
    "LabelText",
    "LintEntry",
    "LintReport",
    "MalformedInput",
    "MemoraisError",
    "OcrDocument",
    "OcrFormat",
    "OcrFragment",
    "OrderingParams",
    "ParseError",
    "Quad",
    "Rule",
    "RuleKind",
    "RuleMatch",
    "Ruleset",
    "ScheduleError",
    "ScheduleParameters",
    "SchedulePlan",
    "Span",
    "TimeDefaults",
    "TimeOfDay",
    "build_schedule",
    "default_ruleset",
    "emit_ics",
    "expand_occurrences",
    "interpret",
    "label_from_ocr",
    "label_from_text",
    "lint_ruleset",
    "load_ruleset",
    "load_time_defaults",
    "normalize",
    "normalize_texts",
    "params_from_json",
    "params_to_json",
    "parse_ics_roundtrip",
    "parse_ocr_document",
    "plan_from_label",
    "reading_order",
    "resolve_times",
    "run_pipeline",
    "serialize_ruleset",
    "uid_seed_for",
]
