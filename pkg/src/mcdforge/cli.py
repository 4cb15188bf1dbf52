"""Command-line front end: check, transform, emit, diff.

Exit codes: 0 success (warnings allowed), 1 parse or conformance failure,
2 blocked forced changes, 3 I/O error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import mcd_parser, migrate_diff, transform_mld
from .model_ir import ConceptualModel, Diagnostic, MigrationPlan, ERROR
from .conformance import check as conformance_check
from .sql_emit import DIALECTS, emit_ddl
from .tapis_gen import build_physical

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_FORCED = 2
EXIT_IO = 3
EXIT_USAGE = 64

_COLORS = {"error": "\x1b[31m", "warning": "\x1b[33m", "PRESERVED": "\x1b[32m", "FORCED": "\x1b[31m"}
_RESET = "\x1b[0m"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 64, not argparse's default 2
        raise _UsageError(message)


def _use_color() -> bool:
    mode = os.environ.get("MCDFORGE_COLOR", "auto")
    if mode == "always":
        return True
    if mode == "never":
        return False
    return sys.stdout.isatty()


def _paint(text: str, key: str) -> str:
    if _use_color() and key in _COLORS:
        return f"{_COLORS[key]}{text}{_RESET}"
    return text


def _print_diagnostics(diagnostics: list[Diagnostic], as_json: bool) -> None:
    if as_json:
        payload = {
            "diagnostics": [
                {
                    "ruleId": d.rule_id,
                    "severity": d.severity,
                    "path": d.path,
                    "message": d.message,
                }
                for d in diagnostics
            ]
        }
        print(json.dumps(payload, indent=2))
        return
    for d in diagnostics:
        line = d.render()
        print(line.replace(d.severity, _paint(d.severity, d.severity), 1))


def _print_plan(plan: MigrationPlan, as_json: bool) -> None:
    if as_json:
        payload = {
            "plan": [
                {
                    "classification": i.classification,
                    "kind": i.kind,
                    "path": i.path,
                    "detail": i.detail,
                }
                for i in plan.items
            ]
        }
        print(json.dumps(payload, indent=2))
        return
    for i in plan.items:
        label = i.classification.upper()
        print(i.render().replace(label, _paint(label, label), 1))


def _read_source(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise SystemExit(_io_failure(f"cannot read {path}: {exc.strerror or exc}"))


def _io_failure(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_IO


def _load_model(path: str, as_json: bool) -> ConceptualModel | None:
    model, diagnostics = mcd_parser.parse(_read_source(path), file=path)
    if diagnostics:
        _print_diagnostics(diagnostics, as_json)
        return None
    return model


def _checked_model(path: str, as_json: bool) -> ConceptualModel | None:
    """Parse and gate on conformance errors; warnings print but pass."""
    model = _load_model(path, as_json)
    if model is None:
        return None
    diagnostics = conformance_check(model)
    failed = any(d.severity == ERROR for d in diagnostics)
    if diagnostics and (failed or not as_json):
        _print_diagnostics(diagnostics, as_json)
    return None if failed else model


def _cmd_check(args) -> int:
    model = _load_model(args.model, args.format == "json")
    if model is None:
        return EXIT_MODEL
    diagnostics = conformance_check(model)
    if diagnostics:
        _print_diagnostics(diagnostics, args.format == "json")
    return EXIT_MODEL if any(d.severity == ERROR for d in diagnostics) else EXIT_OK


def _cmd_transform(args) -> int:
    model = _checked_model(args.model, args.format == "json")
    if model is None:
        return EXIT_MODEL
    logical = transform_mld.transform(model, args.mode)
    text = transform_mld.serialize_logical(logical)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
        except OSError as exc:
            return _io_failure(f"cannot write {args.output}: {exc.strerror or exc}")
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_emit(args) -> int:
    model = _checked_model(args.model, args.format == "json")
    if model is None:
        return EXIT_MODEL
    logical = transform_mld.transform(model, args.mode)
    physical = build_physical(logical, model)
    bundle = emit_ddl(physical, args.dialect)
    try:
        written = bundle.write_to(args.output)
    except OSError as exc:
        return _io_failure(f"cannot write to {args.output}: {exc.strerror or exc}")
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_diff(args) -> int:
    as_json = args.format == "json"
    old_model = _checked_model(args.from_model, as_json)
    if old_model is None:
        return EXIT_MODEL
    new_model = _checked_model(args.to_model, as_json)
    if new_model is None:
        return EXIT_MODEL
    old_physical = build_physical(transform_mld.transform(old_model, args.mode), old_model)
    new_physical = build_physical(transform_mld.transform(new_model, args.mode), new_model)
    try:
        plan = migrate_diff.diff(old_physical, new_physical)
    except migrate_diff.AmbiguousRenameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    _print_plan(plan, as_json)
    if args.output:
        try:
            bundle = migrate_diff.emit_migration(plan, args.dialect, args.allow_forced)
        except migrate_diff.ForcedChangesBlockedError as exc:
            print("forced changes blocked:", file=sys.stderr)
            for item in exc.items:
                print(f"  {item.render()}", file=sys.stderr)
            return EXIT_FORCED
        try:
            bundle.write_to(args.output)
        except OSError as exc:
            return _io_failure(f"cannot write to {args.output}: {exc.strerror or exc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcdforge", description="conceptual data model compiler")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="validate a model against the conformance rules")
    p_check.add_argument("model")
    p_check.add_argument("--format", choices=("text", "json"), default="text")
    p_check.set_defaults(func=_cmd_check)

    p_transform = sub.add_parser("transform", help="produce the relational logical model")
    p_transform.add_argument("model")
    p_transform.add_argument(
        "--mode", choices=transform_mld.MODES, default=transform_mld.IDENTIFYING
    )
    p_transform.add_argument("-o", "--output")
    p_transform.add_argument("--format", choices=("text", "json"), default="text")
    p_transform.set_defaults(func=_cmd_transform)

    p_emit = sub.add_parser("emit", help="run the full pipeline to SQL scripts")
    p_emit.add_argument("model")
    p_emit.add_argument(
        "--mode", choices=transform_mld.MODES, default=transform_mld.IDENTIFYING
    )
    p_emit.add_argument("--dialect", choices=DIALECTS, required=True)
    p_emit.add_argument("-o", "--output", required=True)
    p_emit.add_argument("--format", choices=("text", "json"), default="text")
    p_emit.set_defaults(func=_cmd_emit)

    p_diff = sub.add_parser("diff", help="plan a migration between two models")
    p_diff.add_argument("--from", dest="from_model", required=True)
    p_diff.add_argument("--to", dest="to_model", required=True)
    p_diff.add_argument(
        "--mode", choices=transform_mld.MODES, default=transform_mld.IDENTIFYING
    )
    p_diff.add_argument("--dialect", choices=DIALECTS, default="embedded")
    p_diff.add_argument("--allow-forced", action="store_true")
    p_diff.add_argument("-o", "--output")
    p_diff.add_argument("--format", choices=("text", "json"), default="text")
    p_diff.set_defaults(func=_cmd_diff)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except SystemExit as exc:  # raised by _read_source with the I/O code
        return exc.code if isinstance(exc.code, int) else EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
