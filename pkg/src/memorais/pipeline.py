"""End-to-end composition shared by the CLI and the HTTP service.

Keeping the full pipeline in one place is what makes the two frontends emit
byte-identical documents for identical inputs.
"""

from __future__ import annotations

from datetime import date

from .catalog import Ruleset
from .ics import CalendarMeta, IcsDocument, emit_ics
from .interpret import interpret
from .ocr import OcrFormat, OrderingParams, parse_ocr_document, reading_order
from .schedule import SchedulePlan, TimeDefaults, build_schedule
from .textnorm import LabelText, normalize, normalize_texts


def label_from_ocr(
    raw: bytes | str,
    fmt: OcrFormat | str = OcrFormat.PADDLE_JSON,
    ordering: OrderingParams = OrderingParams(),
    source_id: str = "",
) -> LabelText:
    """OCR document bytes to normalized label text."""
    doc = parse_ocr_document(raw, fmt, source_id=source_id)
    return normalize(reading_order(doc, ordering))


def label_from_text(text: str) -> LabelText:
    """Raw direction text (no OCR stage) to normalized label text."""
    return normalize_texts([text])


def plan_from_label(
    label: LabelText,
    rs: Ruleset,
    cfg: TimeDefaults,
    anchor_date: date,
) -> SchedulePlan:
    """Interpret a label and build its schedule plan."""
    params = interpret(label, rs)
    return build_schedule(params, anchor_date, cfg, label_text=label.text)


def run_pipeline(
    label: LabelText,
    rs: Ruleset,
    cfg: TimeDefaults,
    anchor_date: date,
    meta: CalendarMeta,
) -> IcsDocument:
    """Full pipeline from normalized label text to calendar document."""
    return emit_ics(plan_from_label(label, rs, cfg, anchor_date), meta)
