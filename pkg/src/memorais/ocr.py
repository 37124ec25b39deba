"""Structured OCR ingestion and reading-order reconstruction.

The engine never runs OCR itself. It consumes the structured output of an
external OCR process (text fragments with quadrilateral bounding boxes and
confidences) and rebuilds the order in which a human would read the fragments:
top-to-bottom by line, left-to-right within a line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

from .errors import MalformedInput

Point = tuple[float, float]


class OcrFormat(str, Enum):
    """Supported wire formats for OCR results."""

    PADDLE_JSON = "paddle_json"
    GENERIC_JSON = "generic_json"


@dataclass(frozen=True)
class Quad:
    """Four-corner text polygon in image pixel coordinates, clockwise from top-left.

    Coordinates must be finite and non-negative and the polygon must enclose a
    strictly positive area.
    """

    points: tuple[Point, Point, Point, Point]

    def __post_init__(self):
        if len(self.points) != 4:
            raise ValueError("quad needs exactly four points")
        for x, y in self.points:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("non-finite coordinate")
            if x < 0 or y < 0:
                raise ValueError("negative coordinate")
        if self.area() <= 0:
            raise ValueError("degenerate quad (zero area)")

    def area(self) -> float:
        pts = self.points
        acc = 0.0
        for i in range(4):
            x1, y1 = pts[i]
            x2, y2 = pts[(i + 1) % 4]
            acc += x1 * y2 - x2 * y1
        return abs(acc) / 2.0

    def bounds(self) -> tuple[float, float, float, float]:
        """Axis-aligned bounding rectangle as (left, top, right, bottom)."""
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class OcrFragment:
    """One detected text element."""

    text: str
    quad: Quad
    confidence: float

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("fragment text must contain a non-whitespace character")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError("confidence outside [0, 1]")


@dataclass(frozen=True)
class OcrDocument:
    """All fragments of one label image, in detection order. May be empty."""

    fragments: tuple[OcrFragment, ...]
    source_id: str = ""


@dataclass(frozen=True)
class OrderingParams:
    """Tuning knobs for reading-order reconstruction.

    Two fragments share a line iff the vertical overlap of their bounding
    rectangles is at least ``line_overlap_fraction`` of the shorter rectangle's
    height. Fragments below ``min_confidence`` are discarded before ordering.
    """

    line_overlap_fraction: float = 0.5
    min_confidence: float = 0.0


def _number(value, what: str, index: int) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedInput(f"{what} is not a number", index)
    return float(value)


def _quad_from_raw(raw, index: int) -> Quad:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise MalformedInput("bounding box must list four points", index)
    points = []
    for pt in raw:
        if not isinstance(pt, (list, tuple)) or len(pt) != 2:
            raise MalformedInput("bounding box point must be an [x, y] pair", index)
        points.append((_number(pt[0], "coordinate", index), _number(pt[1], "coordinate", index)))
    try:
        return Quad(tuple(points))
    except ValueError as exc:
        raise MalformedInput(str(exc), index) from exc


def _fragment_from_entry(entry, fmt: OcrFormat, index: int) -> OcrFragment | None:
    if fmt is OcrFormat.PADDLE_JSON:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise MalformedInput("entry must be a [box, [text, confidence]] pair", index)
        box_raw, payload = entry
        if not isinstance(payload, (list, tuple)) or len(payload) != 2:
            raise MalformedInput("entry payload must be [text, confidence]", index)
        text_raw, conf_raw = payload
    else:
        if not isinstance(entry, dict):
            raise MalformedInput("entry must be an object", index)
        for key in ("text", "box", "confidence"):
            if key not in entry:
                raise MalformedInput(f"entry missing field {key!r}", index)
        text_raw, box_raw, conf_raw = entry["text"], entry["box"], entry["confidence"]

    if not isinstance(text_raw, str):
        raise MalformedInput("text is not a string", index)
    quad = _quad_from_raw(box_raw, index)
    confidence = _number(conf_raw, "confidence", index)
    if not (0.0 <= confidence <= 1.0):
        raise MalformedInput(f"confidence {confidence} outside [0, 1]", index)
    if not text_raw.strip():
        return None
    return OcrFragment(text=text_raw, quad=quad, confidence=confidence)


def parse_ocr_document(
    raw: bytes | str,
    fmt: OcrFormat | str = OcrFormat.PADDLE_JSON,
    source_id: str = "",
) -> OcrDocument:
    """Parse OCR results in the named wire format into an OcrDocument.

    Input order is preserved. Entries whose text is empty or whitespace-only
    are dropped; every structural defect raises MalformedInput with the index
    of the offending entry.
    """
    fmt = OcrFormat(fmt)
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"not valid UTF-8: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedInput("top-level value must be an array")

    fragments = []
    for index, entry in enumerate(data):
        fragment = _fragment_from_entry(entry, fmt, index)
        if fragment is not None:
            fragments.append(fragment)
    return OcrDocument(fragments=tuple(fragments), source_id=source_id)


def _same_line(
    a: tuple[float, float, float, float],
    b: tuple[float, float, float, float],
    fraction: float,
) -> bool:
    overlap = min(a[3], b[3]) - max(a[1], b[1])
    shorter = min(a[3] - a[1], b[3] - b[1])
    return overlap >= fraction * shorter


def reading_order(doc: OcrDocument, params: OrderingParams = OrderingParams()) -> list[OcrFragment]:
    """Return doc's fragments permuted into human reading order.

    Fragments are clustered into lines by transitive closure of the pairwise
    vertical-overlap relation, lines are sorted by the top edge of their union
    rectangle, and fragments within a line by their left edge. All ties fall
    back to the original detection index, so the result is deterministic for
    any geometry.
    """
    kept = [
        (i, f) for i, f in enumerate(doc.fragments) if f.confidence >= params.min_confidence
    ]
    if not kept:
        return []

    boxes = {i: f.quad.bounds() for i, f in kept}
    parent = {i: i for i, _ in kept}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    indices = [i for i, _ in kept]
    for a_pos, a in enumerate(indices):
        for b in indices[a_pos + 1 :]:
            if _same_line(boxes[a], boxes[b], params.line_overlap_fraction):
                parent[find(a)] = find(b)

    lines: dict[int, list[int]] = {}
    for i in indices:
        lines.setdefault(find(i), []).append(i)

    ordered_lines = sorted(
        lines.values(), key=lambda members: (min(boxes[i][1] for i in members), min(members))
    )
    result = []
    for members in ordered_lines:
        members.sort(key=lambda i: (boxes[i][0], i))
        result.extend(doc.fragments[i] for i in members)
    return result
