"""Operator command line: init, serve, import/export, reports, integrity check.

Exit codes: 0 success, 1 usage error, 2 data/integrity error, 3 I/O error.
Report and export bytes go to stdout so redirection composes; status messages
go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Optional

from .domain import DEFAULT_PASSING_THRESHOLD
from .errors import (
    CorruptJournal,
    CorruptSnapshot,
    DomainError,
    IoFailure,
    LockHeld,
    VersionMismatch,
)
from . import reporting
from .persistence import StoreEngine, integrity_check, is_write_locked, open_store
from .service import DATA_DIR_ENV, ServiceConfig, parse_listen_addr, serve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3

IMPORT_HEADER = ["family_name", "given_name", "national_id"]


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; the CLI contract reserves 2 for
    # data errors, so usage failures are remapped to 1.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="doktorant", description="Doctoral-candidate records registry")
    parser.add_argument(
        "--data-dir",
        default=os.environ.get(DATA_DIR_ENV),
        help=f"data directory (default: ${DATA_DIR_ENV})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("init", help="create an empty data directory")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--addr", default="127.0.0.1:8077", help="listen address HOST:PORT")
    p_serve.add_argument(
        "--passing-threshold",
        default=str(DEFAULT_PASSING_THRESHOLD),
        help="exam passing grade (default 4.50)",
    )

    p_import = sub.add_parser("import", help="bulk-load records")
    import_sub = p_import.add_subparsers(dest="what", required=True)
    p_import_d = import_sub.add_parser("doctorants", help="create Applied dossiers from CSV")
    p_import_d.add_argument("--csv", required=True, metavar="FILE", dest="csv_file")

    p_export = sub.add_parser("export", help="dump entities to stdout")
    p_export.add_argument("--format", choices=["json", "csv"], default="json")
    p_export.add_argument(
        "--what", choices=["doctorants", "supervisors", "competitions"], required=True
    )

    p_report = sub.add_parser("report", help="generate a report on stdout")
    report_sub = p_report.add_subparsers(dest="kind", required=True)
    p_min = report_sub.add_parser("ministry")
    p_min.add_argument("--year", required=True, metavar="YYYY/YYYY")
    p_min.add_argument("--format", choices=["json", "csv"], default="json")
    p_plan = report_sub.add_parser("individual-plan")
    p_plan.add_argument("--id", required=True, dest="doctorant_id")
    p_plan.add_argument("--format", choices=["json", "csv"], default="json")
    p_load = report_sub.add_parser("supervisor-load")
    p_load.add_argument("--format", choices=["json", "csv"], default="json")
    p_act = report_sub.add_parser("activity")
    p_act.add_argument("--id", required=True, dest="doctorant_id")
    p_act.add_argument("--year", required=True, metavar="YYYY/YYYY")
    p_act.add_argument("--format", choices=["json", "csv"], default="json")

    sub.add_parser("check", help="verify journal, snapshot and domain integrity")
    sub.add_parser("snapshot", help="write a snapshot at the current journal tail")

    return parser


def _require_data_dir(args: argparse.Namespace, parser: _Parser) -> Path:
    if not args.data_dir:
        parser.error(f"--data-dir is required (or set ${DATA_DIR_ENV})")
    return Path(args.data_dir)


def _cmd_init(data_dir: Path) -> int:
    data_dir.mkdir(parents=True, exist_ok=True)
    open_store(data_dir)  # creates the empty journal
    print(f"initialized {data_dir}", file=sys.stderr)
    return EXIT_OK


def _cmd_serve(data_dir: Path, addr: str, threshold_text: str) -> int:
    try:
        threshold = Decimal(threshold_text)
    except InvalidOperation:
        print(f"doktorant: bad passing threshold {threshold_text!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        parse_listen_addr(addr)
    except ValueError as exc:
        print(f"doktorant: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if is_write_locked(data_dir):
        print(f"doktorant: LockHeld: another writer owns {data_dir}", file=sys.stderr)
        return EXIT_DATA
    config = ServiceConfig(listen_addr=addr, data_dir=data_dir, passing_threshold=threshold)
    try:
        serve(config)
    except SystemExit as exc:  # uvicorn startup failures
        code = exc.code if isinstance(exc.code, int) else 1
        return EXIT_IO if code else EXIT_OK
    return EXIT_OK


def _cmd_import_doctorants(data_dir: Path, csv_file: str) -> int:
    try:
        with open(csv_file, encoding="utf-8-sig", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        print(f"doktorant: cannot read {csv_file}: {exc}", file=sys.stderr)
        return EXIT_IO
    if not rows or rows[0] != IMPORT_HEADER:
        print(
            f"doktorant: first line must be {','.join(IMPORT_HEADER)}",
            file=sys.stderr,
        )
        return EXIT_DATA
    engine = StoreEngine(data_dir)
    imported = 0
    try:
        for line_no, row in enumerate(rows[1:], start=2):
            if len(row) != len(IMPORT_HEADER):
                print(f"doktorant: line {line_no}: expected {len(IMPORT_HEADER)} columns", file=sys.stderr)
                return EXIT_DATA
            family, given, national = row
            engine.execute(
                "register_doctorant",
                {
                    "family_name": family,
                    "given_name": given,
                    "national_id": national or None,
                    "competition_id": None,
                },
            )
            imported += 1
    finally:
        engine.close(snapshot=False)
    print(f"imported {imported} doctorants", file=sys.stderr)
    return EXIT_OK


def _cmd_export(data_dir: Path, what: str, format: str) -> int:
    store = open_store(data_dir)
    sys.stdout.buffer.write(reporting.export_entities(store, what, format))
    sys.stdout.buffer.flush()
    return EXIT_OK


def _cmd_report(data_dir: Path, args: argparse.Namespace) -> int:
    store = open_store(data_dir)
    if args.kind == "ministry":
        report = reporting.ministry_report(store, args.year)
    elif args.kind == "individual-plan":
        report = reporting.individual_plan(store, args.doctorant_id)
    elif args.kind == "supervisor-load":
        report = reporting.supervisor_load(store)
    else:
        report = reporting.annual_activity_report(store, args.doctorant_id, args.year)
    sys.stdout.buffer.write(reporting.export_table(report, args.format))
    sys.stdout.buffer.flush()
    return EXIT_OK


def _cmd_check(data_dir: Path) -> int:
    findings = integrity_check(data_dir)
    for finding in findings:
        print(str(finding))
    if findings:
        return EXIT_DATA
    print("ok")
    return EXIT_OK


def _cmd_snapshot(data_dir: Path) -> int:
    engine = StoreEngine(data_dir)
    try:
        engine.write_snapshot()
        seq = engine.store.next_event_seq - 1
    finally:
        engine.close(snapshot=False)
    print(f"snapshot written at seq {seq}", file=sys.stderr)
    return EXIT_OK


def run_cli(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        data_dir = _require_data_dir(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "init":
            return _cmd_init(data_dir)
        if args.command == "serve":
            return _cmd_serve(data_dir, args.addr, args.passing_threshold)
        if args.command == "import":
            return _cmd_import_doctorants(data_dir, args.csv_file)
        if args.command == "export":
            return _cmd_export(data_dir, args.what, args.format)
        if args.command == "report":
            return _cmd_report(data_dir, args)
        if args.command == "check":
            return _cmd_check(data_dir)
        if args.command == "snapshot":
            return _cmd_snapshot(data_dir)
        raise AssertionError(f"unhandled command {args.command}")
    except (CorruptJournal, CorruptSnapshot, VersionMismatch, LockHeld) as exc:
        print(f"doktorant: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except IoFailure as exc:
        print(f"doktorant: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_IO
    except DomainError as exc:
        print(f"doktorant: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"doktorant: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
