"""Label text normalization.

Turns reading-ordered OCR fragments into the single lowercase string the rule
catalog matches against: number words become digits, whitespace collapses, and
a span map records which fragment contributed each character range.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .ocr import OcrFragment

_UNITS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6, "seven": 7,
    "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13,
    "fourteen": 14, "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19, "twenty": 20,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50, "sixty": 60,
    "seventy": 70, "eighty": 80, "ninety": 90,
}
_COMPOUNDS = {
    f"{tens_word}-{unit_word}": tens_value + unit_value
    for tens_word, tens_value in _TENS.items()
    for unit_word, unit_value in _UNITS.items()
    if 1 <= unit_value <= 9
}

# "once", "twice" and "thrice" are deliberately absent: the rule catalog
# matches them as words.
_NUMBER_WORDS = {**_COMPOUNDS, **_UNITS, **_TENS, "hundred": 100}

_NUMBER_WORD_RE = re.compile(
    r"\b(" + "|".join(sorted(_NUMBER_WORDS, key=len, reverse=True)) + r")\b"
)
_WHITESPACE_RE = re.compile(r"\s+")


class Span(NamedTuple):
    """Half-open character range of normalized text owned by one fragment."""

    start: int
    end: int
    fragment_index: int


@dataclass(frozen=True)
class LabelText:
    """Normalized, reading-ordered label string with fragment provenance."""

    text: str
    spans: tuple[Span, ...] = ()

    def __post_init__(self):
        t = self.text
        if any(c.isupper() for c in t):
            raise ValueError("normalized text must not contain uppercase letters")
        if "  " in t:
            raise ValueError("normalized text must not contain consecutive spaces")
        if t != t.strip():
            raise ValueError("normalized text must not have leading/trailing whitespace")
        covered = bytearray(len(t))
        prev_end = 0
        for span in self.spans:
            if not (0 <= span.start < span.end <= len(t)):
                raise ValueError(f"span {span} out of bounds")
            if span.start < prev_end:
                raise ValueError(f"span {span} overlaps or is out of order")
            prev_end = span.end
            for i in range(span.start, span.end):
                covered[i] = 1
        for i, c in enumerate(t):
            if c != " " and not covered[i]:
                raise ValueError(f"character {i} ({c!r}) not covered by any span")


def _normalize_chunk(raw: str) -> str:
    lowered = raw.lower()
    replaced = _NUMBER_WORD_RE.sub(lambda m: str(_NUMBER_WORDS[m.group(1)]), lowered)
    return _WHITESPACE_RE.sub(" ", replaced).strip()


def normalize_texts(texts: Sequence[str]) -> LabelText:
    """Normalize raw text chunks (one per fragment, in reading order)."""
    parts: list[str] = []
    spans: list[Span] = []
    cursor = 0
    for index, raw in enumerate(texts):
        chunk = _normalize_chunk(raw)
        if not chunk:
            continue
        if parts:
            cursor += 1  # joining space, owned by no fragment
        spans.append(Span(cursor, cursor + len(chunk), index))
        parts.append(chunk)
        cursor += len(chunk)
    return LabelText(text=" ".join(parts), spans=tuple(spans))


def normalize(ordered_fragments: Sequence[OcrFragment]) -> LabelText:
    """Produce the normalized label text for fragments in reading order."""
    return normalize_texts([f.text for f in ordered_fragments])
