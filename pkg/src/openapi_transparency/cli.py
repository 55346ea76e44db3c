"""Command line front door: validate, report, diff, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .aggregation import FlowEdge
from .diagnostics import Severity, has_errors
from .hub import ENV_DATA_DIR, ENV_PORT, HubConfig, create_app
from .openapi_model import parse_document
from .registry import DirectoryStore, Registry, RegistryError, diff_spec_texts
from .resolver import validate_service

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2

SPEC_SUFFIXES = (".yaml", ".yml", ".json")


def _read_file(path: str) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None


def cmd_validate(args: argparse.Namespace) -> int:
    text = _read_file(args.file)
    if text is None:
        return EXIT_USAGE
    result = parse_document(text)
    diagnostics = list(result.diagnostics)
    if result.document is not None:
        diagnostics.extend(validate_service(result.document))

    if args.format == "json":
        print(json.dumps([d.to_dict() for d in diagnostics], indent=2))
    else:
        for d in diagnostics:
            location = f" [{d.site.text()}]" if d.site else ""
            position = f" (line {d.line}, col {d.column})" if d.line else ""
            print(f"{d.severity.value}: {d.code}: {d.message}{location}{position}")
        errors = sum(1 for d in diagnostics if d.severity is Severity.ERROR)
        warnings = sum(1 for d in diagnostics if d.severity is Severity.WARNING)
        print(f"{errors} error(s), {warnings} warning(s)")
    return EXIT_FINDINGS if has_errors(diagnostics) or result.document is None else EXIT_OK


def _load_links(path: str) -> list[FlowEdge]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [
        FlowEdge(e["sender"], e["receiver"], tuple(e.get("datum_names", ())))
        for e in data.get("edges", [])
    ]


def build_registry_from_dir(directory: str, links_file: str | None = None) -> Registry:
    """Register every spec file of a directory into a fresh in-memory registry.

    Service names come from the file names, so a corpus directory mirrors what
    webhook-registered repositories of the same names would produce.
    """
    registry = Registry()
    spec_files = sorted(
        p for p in Path(directory).iterdir() if p.suffix.lower() in SPEC_SUFFIXES and p.name != "links.json"
    )
    for spec_file in spec_files:
        registry.register_service(name=spec_file.stem, spec_text=spec_file.read_text(encoding="utf-8"))
    if links_file:
        registry.set_links(_load_links(links_file))
    else:
        default_links = Path(directory) / "links.json"
        if default_links.exists():
            registry.set_links(_load_links(str(default_links)))
    return registry


def cmd_report(args: argparse.Namespace) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        print(f"error: {args.dir} is not a directory", file=sys.stderr)
        return EXIT_USAGE
    try:
        registry = build_registry_from_dir(args.dir, args.links)
    except RegistryError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        for d in getattr(exc, "diagnostics", []) or []:
            print(f"  {d.severity.value}: {d.message}", file=sys.stderr)
        return EXIT_FINDINGS
    print(json.dumps(registry.generate_report(), indent=2))
    return EXIT_OK


def cmd_diff(args: argparse.Namespace) -> int:
    text_a = _read_file(args.file_a)
    text_b = _read_file(args.file_b)
    if text_a is None or text_b is None:
        return EXIT_USAGE
    try:
        diff = diff_spec_texts(text_a, text_b)
    except RegistryError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_FINDINGS
    print(json.dumps(diff.to_dict(), indent=2))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    data_dir = args.data_dir or os.environ.get(ENV_DATA_DIR) or "./hub-data"
    port = args.port or int(os.environ.get(ENV_PORT, "8080"))
    config = HubConfig.from_env()
    if args.token:
        config.token = args.token
    registry = Registry(DirectoryStore(data_dir))
    app = create_app(registry, config)
    print(f"serving transparency hub on port {port}, data in {data_dir}")
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openapi-transparency",
        description="Validate, diff, aggregate, and serve transparency-annotated OpenAPI documents",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate one specification file")
    p_validate.add_argument("file")
    p_validate.add_argument("--format", choices=("text", "json"), default="text")
    p_validate.set_defaults(func=cmd_validate)

    p_report = sub.add_parser("report", help="aggregate a directory of specs into a report")
    p_report.add_argument("--dir", required=True, help="directory of spec files")
    p_report.add_argument("--links", help="data-flow links manifest (JSON)")
    p_report.set_defaults(func=cmd_report)

    p_diff = sub.add_parser("diff", help="semantic diff between two specification files")
    p_diff.add_argument("file_a")
    p_diff.add_argument("file_b")
    p_diff.set_defaults(func=cmd_diff)

    p_serve = sub.add_parser("serve", help="run the transparency hub")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--data-dir", default=None)
    p_serve.add_argument("--token", default=None, help="bearer token for mutating routes")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
