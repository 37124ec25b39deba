"""Command-line frontend: the full pipeline plus each stage on its own.

Exit codes: 2 malformed input or configuration, 3 interpretation failure,
4 scheduling failure, 5 external OCR command failure. Errors go to stderr as
one JSON object per line.
"""

from __future__ import annotations

import functools
import json
import shlex
import subprocess
import sys
from datetime import date, datetime, timezone
from pathlib import Path

import click

from .catalog import default_ruleset, lint_ruleset, load_ruleset
from .errors import (
    CatalogError,
    InterpretationFailure,
    MalformedInput,
    MemoraisError,
    ScheduleError,
)
from .ics import CalendarMeta, emit_ics
from .interpret import interpret, params_from_json, params_to_json
from .pipeline import label_from_ocr, label_from_text, plan_from_label, run_pipeline
from .schedule import (
    TimeDefaults,
    build_schedule,
    expand_occurrences,
    load_time_defaults,
    with_horizon,
)

_FORMAT_ALIASES = {"paddle": "paddle_json", "generic": "generic_json"}


def _fail(code: int, error: str, **fields) -> None:
    click.echo(json.dumps({"error": error, **fields}), err=True)
    sys.exit(code)


def _handle_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except MalformedInput as exc:
            _fail(2, "malformed_input", reason=exc.reason, entry_index=exc.entry_index)
        except CatalogError as exc:
            _fail(2, "catalog_error", rule_id=exc.rule_id, reason=exc.reason)
        except InterpretationFailure as exc:
            _fail(
                3,
                "interpretation_failure",
                normalized_text=exc.normalized_text,
                partial_matches=[list(m) for m in exc.partial_matches],
            )
        except ScheduleError as exc:
            _fail(4, "schedule_error", reason=str(exc))
        except MemoraisError as exc:  # EmitError / ParseError: engine defects
            _fail(1, "internal_error", reason=str(exc))

    return wrapper


def _load_rules(path: str | None):
    if path is None:
        return default_ruleset()
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        _fail(2, "catalog_error", rule_id=None, reason=f"cannot read {path}: {exc}")
    return load_ruleset(raw)


def _load_defaults(path: str | None) -> TimeDefaults:
    if path is None:
        return TimeDefaults()
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        _fail(2, "malformed_input", reason=f"cannot read {path}: {exc}", entry_index=None)
    return load_time_defaults(raw)


def _parse_anchor(value: str | None) -> date:
    if value is None:
        return date.today()
    try:
        return date.fromisoformat(value)
    except ValueError:
        _fail(2, "malformed_input", reason=f"bad anchor date {value!r}", entry_index=None)


def _parse_dtstamp(value: str | None) -> datetime:
    if value is None:
        return datetime.now(timezone.utc)
    try:
        return datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        _fail(2, "malformed_input", reason=f"bad dtstamp {value!r}", entry_index=None)


def _run_ocr_command(template: str, image_path: str) -> bytes:
    argv = [part.replace("{image}", image_path) for part in shlex.split(template)]
    try:
        proc = subprocess.run(argv, capture_output=True, check=False)
    except OSError as exc:
        _fail(5, "ocr_command_failure", reason=str(exc))
    if proc.returncode != 0:
        _fail(
            5,
            "ocr_command_failure",
            reason=f"exit status {proc.returncode}",
            stderr=proc.stderr.decode("utf-8", "replace")[-500:],
        )
    return proc.stdout


def _read_input(input_arg: str | None) -> bytes:
    if input_arg is None or input_arg == "-":
        return click.get_binary_stream("stdin").read()
    try:
        return Path(input_arg).read_bytes()
    except OSError as exc:
        _fail(2, "malformed_input", reason=f"cannot read {input_arg}: {exc}", entry_index=None)


def _acquire_label(input_arg, text, fmt, ocr_cmd):
    if text is not None:
        return label_from_text(text)
    if ocr_cmd is not None:
        if input_arg is None or input_arg == "-":
            _fail(2, "malformed_input", reason="--ocr-cmd needs an image path argument")
        raw = _run_ocr_command(ocr_cmd, input_arg)
        return label_from_ocr(raw, "paddle_json", source_id=input_arg)
    raw = _read_input(input_arg)
    return label_from_ocr(raw, _FORMAT_ALIASES[fmt], source_id=input_arg or "<stdin>")


def _write_output(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def _input_options(f):
    f = click.argument("input", required=False)(f)
    f = click.option("--text", help="Interpret this direction text instead of OCR input.")(f)
    f = click.option(
        "--format",
        "fmt",
        type=click.Choice(["paddle", "generic"]),
        default="paddle",
        show_default=True,
        help="OCR input wire format.",
    )(f)
    f = click.option(
        "--ocr-cmd",
        help="External OCR command template; {image} is replaced by INPUT. "
        "Its stdout must be paddle-format JSON.",
    )(f)
    return f


def _config_options(f):
    f = click.option(
        "--rules",
        envvar="MEMORAIS_RULES",
        help="Rule catalog path (default: embedded catalog).",
    )(f)
    f = click.option("--time-defaults", help="Time defaults configuration path.")(f)
    return f


@click.group()
@click.version_option(package_name="memorais")
def main():
    """Turn prescription-label OCR output into calendar reminder files."""


@main.command("pipeline")
@_input_options
@_config_options
@click.option("--anchor", help="Schedule anchor date, YYYY-MM-DD (default: today).")
@click.option("--dtstamp", help="Calendar DTSTAMP, ISO 8601 (default: now).")
@click.option("--horizon", type=int, help="Horizon in days for open-ended prescriptions.")
@click.option("--out", help="Write the calendar here instead of stdout.")
@_handle_errors
def cmd_pipeline(input, text, fmt, ocr_cmd, rules, time_defaults, anchor, dtstamp, horizon, out):
    """Run the full pipeline and emit an .ics document."""
    rs = _load_rules(rules)
    cfg = with_horizon(_load_defaults(time_defaults), horizon)
    label = _acquire_label(input, text, fmt, ocr_cmd)
    meta = CalendarMeta(dtstamp=_parse_dtstamp(dtstamp))
    doc = run_pipeline(label, rs, cfg, _parse_anchor(anchor), meta)
    _write_output(doc.data, out)


@main.command("interpret")
@_input_options
@_config_options
@click.option("--out", help="Write the parameters document here instead of stdout.")
@_handle_errors
def cmd_interpret(input, text, fmt, ocr_cmd, rules, time_defaults, out):
    """Run the pipeline through interpretation; print schedule parameters."""
    rs = _load_rules(rules)
    _load_defaults(time_defaults)  # validate eagerly even though unused here
    label = _acquire_label(input, text, fmt, ocr_cmd)
    params = interpret(label, rs)
    _write_output(params_to_json(params, label.text), out)


@main.command("schedule")
@click.argument("input", required=False)
@_config_options
@click.option("--anchor", help="Schedule anchor date, YYYY-MM-DD (default: today).")
@click.option("--dtstamp", help="Calendar DTSTAMP, ISO 8601 (default: now).")
@click.option("--horizon", type=int, help="Horizon in days for open-ended prescriptions.")
@click.option("--out", help="Write the calendar here instead of stdout.")
@_handle_errors
def cmd_schedule(input, rules, time_defaults, anchor, dtstamp, horizon, out):
    """Build and emit a calendar from an interpreted-parameters document."""
    _load_rules(rules)  # validate the configured catalog even though unused here
    cfg = with_horizon(_load_defaults(time_defaults), horizon)
    params, normalized_text = params_from_json(_read_input(input))
    plan = build_schedule(params, _parse_anchor(anchor), cfg, label_text=normalized_text)
    doc = emit_ics(plan, CalendarMeta(dtstamp=_parse_dtstamp(dtstamp)))
    _write_output(doc.data, out)


@main.command("expand")
@_input_options
@_config_options
@click.option("--params", "params_path", help="Expand from a parameters document instead.")
@click.option("--anchor", help="Schedule anchor date, YYYY-MM-DD (default: today).")
@click.option("--horizon", type=int, help="Horizon in days for open-ended prescriptions.")
@_handle_errors
def cmd_expand(input, text, fmt, ocr_cmd, rules, time_defaults, params_path, anchor, horizon):
    """Print every occurrence timestamp of the schedule, one per line."""
    rs = _load_rules(rules)
    cfg = with_horizon(_load_defaults(time_defaults), horizon)
    anchor_date = _parse_anchor(anchor)
    if params_path is not None:
        params, normalized_text = params_from_json(_read_input(params_path))
        plan = build_schedule(params, anchor_date, cfg, label_text=normalized_text)
    else:
        label = _acquire_label(input, text, fmt, ocr_cmd)
        plan = plan_from_label(label, rs, cfg, anchor_date)
    for moment in expand_occurrences(plan):
        click.echo(moment.isoformat(sep=" "))


@main.command("rules-lint")
@click.option("--rules", envvar="MEMORAIS_RULES", help="Rule catalog path (default: embedded).")
@click.option("--corpus", required=True, help="Corpus file, one direction string per line.")
@_handle_errors
def cmd_rules_lint(rules, corpus):
    """Check a catalog against a sig corpus; exit 1 on unmatched strings or conflicts."""
    rs = _load_rules(rules)
    try:
        lines = [
            ln for ln in Path(corpus).read_text("utf-8").splitlines() if ln.strip()
        ]
    except OSError as exc:
        _fail(2, "malformed_input", reason=f"cannot read {corpus}: {exc}", entry_index=None)
    report = lint_ruleset(rs, lines)
    for entry in report.entries:
        status = "ok"
        if not entry.frequency_matched:
            status = "unmatched"
        elif entry.conflicts:
            status = "conflict:" + ",".join(entry.conflicts)
        click.echo(f"{status}\t{entry.text}\t[{' '.join(entry.matched_rule_ids)}]")
    if report.unused_rule_ids:
        click.echo("unused rules: " + ", ".join(report.unused_rule_ids))
    click.echo(
        f"{len(report.entries)} strings, {len(report.unmatched_strings)} unmatched, "
        f"{sum(1 for e in report.entries if e.conflicts)} with conflicts"
    )
    if report.has_findings:
        sys.exit(1)


@main.command("serve")
@click.option("--port", envvar="MEMORAIS_PORT", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@_config_options
@click.option(
    "--frozen-dtstamp",
    help="Fix DTSTAMP to this ISO 8601 instant (testing; default: per-request now).",
)
@_handle_errors
def cmd_serve(port, host, rules, time_defaults, frozen_dtstamp):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(
        ruleset=_load_rules(rules),
        time_defaults=_load_defaults(time_defaults),
        frozen_dtstamp=_parse_dtstamp(frozen_dtstamp) if frozen_dtstamp else None,
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
