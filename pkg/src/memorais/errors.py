"""Exception types shared across the reminder engine."""

from __future__ import annotations


class MemoraisError(Exception):
    """Base class for every error raised by this package."""


class MalformedInput(MemoraisError):
    """An OCR input document (or serialized intermediate) is structurally invalid.

    ``entry_index`` points at the offending element of the input array, or is
    None when the document as a whole cannot be parsed.
    """

    def __init__(self, reason: str, entry_index: int | None = None):
        self.reason = reason
        self.entry_index = entry_index
        where = f" at entry {entry_index}" if entry_index is not None else ""
        super().__init__(f"malformed input{where}: {reason}")


class CatalogError(MemoraisError):
    """A rule catalog violates its invariants; carries the offending rule id."""

    def __init__(self, rule_id: str | None, reason: str):
        self.rule_id = rule_id
        self.reason = reason
        who = f"rule {rule_id!r}: " if rule_id else ""
        super().__init__(f"{who}{reason}")


class InterpretationFailure(MemoraisError):
    """No frequency indicator matched the label text.

    Deliberately fatal: a label we cannot read needs human review, never a
    silently defaulted schedule. Carries the normalized text and whatever
    duration matches were found before the failure.
    """

    def __init__(self, normalized_text: str, partial_matches: tuple = ()):
        self.normalized_text = normalized_text
        self.partial_matches = partial_matches
        super().__init__(
            f"no frequency indicator matched the label text: {normalized_text!r}"
        )


class ScheduleError(MemoraisError):
    """Schedule parameters cannot be realized as a concrete event plan."""


class EmitError(MemoraisError):
    """A schedule plan violates emitter invariants (defensive check)."""


class ParseError(MemoraisError):
    """An emitted calendar document failed to re-parse (signals an emitter bug)."""
