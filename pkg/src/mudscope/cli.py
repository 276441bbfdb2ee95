"""Command-line front door: validate, graph, serve, bench."""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path

import click

from mudscope import __version__
from mudscope.export import graph_to_dot, graph_to_json
from mudscope.parser import ValidationReport, Severity, parse_mud_file
from mudscope.topology import ConnectivityGraph
from mudscope.tree import to_dot as tree_to_dot, to_text as tree_to_text

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_PENDING = 3
EXIT_PORT_IN_USE = 4


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Analyze MUD files: validation, connectivity graphs, and a review service."""


def _emit_report(report: ValidationReport, as_json: bool) -> None:
    if as_json:
        click.echo(report.to_json_line())
        return
    click.echo(f"{report.file_ref}:")
    if not report.items:
        click.echo("  ok")
    for item in report.items:
        click.echo(f"  [{item.severity.value}] {item.code} at {item.path or '/'}: "
                   f"{item.message}")


def _load_reports(paths) -> tuple[list, bool, bool]:
    """Parse each path; returns (per-file results, any_error, any_missing)."""
    results = []
    any_error = False
    any_missing = False
    for path in paths:
        ref = str(path)
        file_path = Path(path)
        if not file_path.is_file():
            report = ValidationReport(file_ref=ref)
            report.add(Severity.ERROR, "", "file does not exist", "MissingFile")
            results.append((ref, None, report))
            any_missing = True
            continue
        profile, report = parse_mud_file(file_path.read_text(encoding="utf-8"),
                                         file_ref=ref)
        if report.has_errors:
            any_error = True
        results.append((ref, profile, report))
    return results, any_error, any_missing


@main.command()
@click.argument("paths", nargs=-1, required=True)
@click.option("--json", "as_json", is_flag=True, help="one JSON report line per file")
def validate(paths, as_json: bool) -> None:
    """Validate MUD files; exit 0 iff no file has Errors."""
    results, any_error, any_missing = _load_reports(paths)
    for _, _, report in results:
        _emit_report(report, as_json)
    if any_missing:
        sys.exit(EXIT_USAGE)
    sys.exit(EXIT_VALIDATION if any_error else EXIT_OK)


@main.command()
@click.argument("paths", nargs=-1, required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "dot"]), default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="output file (default stdout)")
@click.option("--controller-map", "controller_map", type=click.Path(exists=True),
              default=None, help="JSON object mapping class URIs to host lists")
@click.option("--strict-alg1", "strict", is_flag=True,
              help="use the literal layer-subset merge guard (comparison mode)")
@click.option("--one-sided-links", "one_sided", is_flag=True,
              help="emit links justified by one side's policy only")
@click.option("--dump-trees", "dump_trees", is_flag=True,
              help="dump per-destination ACE trees (text + DOT) to stderr")
@click.option("--require-complete", "require_complete", is_flag=True,
              help="exit 3 when pending promises remain")
def graph(paths, fmt, out, controller_map, strict, one_sided, dump_trees,
          require_complete) -> None:
    """Build the connectivity graph for a set of MUD files."""
    results, any_error, any_missing = _load_reports(paths)
    if any_error or any_missing:
        for _, _, report in results:
            if report.has_errors:
                _emit_report(report, as_json=False)
        sys.exit(EXIT_VALIDATION)

    engine = ConnectivityGraph(strict=strict, one_sided=one_sided)
    if dump_trees:
        def observer(context, built, pruned) -> None:
            click.echo(f"# tree {context} (built)", err=True)
            click.echo(tree_to_text(built), err=True, nl=False)
            click.echo(tree_to_dot(built, f"{context} built"), err=True, nl=False)
            click.echo(f"# tree {context} (pruned)", err=True)
            click.echo(tree_to_text(pruned), err=True, nl=False)
            click.echo(tree_to_dot(pruned, f"{context} pruned"), err=True, nl=False)

        engine.tree_observer = observer
    for _, profile, _ in results:
        engine.add_profile(profile)

    if controller_map:
        mapping = json.loads(Path(controller_map).read_text(encoding="utf-8"))
        for class_uri, hosts in mapping.items():
            engine.fulfill_by_class(class_uri, hosts)

    artifact = graph_to_json(engine) if fmt == "json" else graph_to_dot(engine)
    if out:
        Path(out).write_text(artifact, encoding="utf-8")
    else:
        click.echo(artifact, nl=False)

    if require_complete and any(p.pending for p in engine.promises.values()):
        sys.exit(EXIT_PENDING)
    sys.exit(EXIT_OK)


@main.command()
@click.option("--port", type=int, default=8520, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--state-dir", "state_dir", type=click.Path(file_okay=False),
              envvar="MUDSCOPE_STATE_DIR", default=None,
              help="directory persisting profiles and the promise ledger")
def serve(port: int, host: str, state_dir) -> None:
    """Run the HTTP review service."""
    import uvicorn

    from mudscope.service import create_app

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError:
        click.echo(f"port {port} is already in use", err=True)
        sys.exit(EXIT_PORT_IN_USE)
    finally:
        probe.close()

    app = create_app(Path(state_dir) if state_dir else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--copies", type=click.IntRange(min=1), required=True,
              help="number of profile copies to load")
@click.option("--file", "file_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="heavy MUD profile to replicate")
@click.option("--strict-alg1", "strict", is_flag=True)
def bench(copies: int, file_path, strict: bool) -> None:
    """Load N copies of a profile and report per-phase timing and peak memory."""
    from mudscope.bench import run_bench

    document = Path(file_path).read_text(encoding="utf-8")
    result = run_bench(document, copies, strict=strict)
    click.echo(json.dumps(result, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
