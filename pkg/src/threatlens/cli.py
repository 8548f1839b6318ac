"""Command-line surface: every analysis is scriptable without the UI.

Exit codes: 0 success, 1 validation failure, 2 I/O failure.
"""

import functools
import json
import sys
from pathlib import Path

import click

from .corpus import (
    build_corpus,
    corpus_sha256,
    load_corpus,
    parse_capec,
    parse_cwe,
    parse_nvd_feed,
    save_corpus,
)
from .errors import Diagnostic, ToolError
from .graphs import parse_topology_graphml
from .matching import match_system
from .project import ProjectBundle, load_bundle, save_bundle
from .shell import load_project, run_report
from . import analysis


def _tool_errors(func):
    """Map tool and I/O failures onto the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ToolError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _echo_diagnostics(diagnostics: list[Diagnostic]) -> None:
    for diagnostic in diagnostics:
        click.echo(str(diagnostic), err=True)


@click.group()
@click.version_option(package_name="threatlens")
def main():
    """Model-based security analysis over system topologies and attack-vector corpora."""


@main.command()
@click.option("--capec", "capec_files", multiple=True, type=click.Path(exists=True, path_type=Path))
@click.option("--cwe", "cwe_files", multiple=True, type=click.Path(exists=True, path_type=Path))
@click.option("--nvd", "nvd_files", multiple=True, type=click.Path(exists=True, path_type=Path))
@click.option("-o", "--output", required=True, type=click.Path(path_type=Path))
@_tool_errors
def ingest(capec_files, cwe_files, nvd_files, output):
    """Build a corpus snapshot from CAPEC/CWE/NVD dataset files."""
    diagnostics: list[Diagnostic] = []
    entries = []
    for path in capec_files:
        entries += parse_capec(path.read_text(), diagnostics)
    for path in cwe_files:
        entries += parse_cwe(path.read_text(), diagnostics)
    for path in nvd_files:
        entries += parse_nvd_feed(path.read_bytes(), diagnostics)
    corpus = build_corpus(entries, diagnostics)
    save_corpus(corpus, output)
    _echo_diagnostics(diagnostics)
    counts = ", ".join(f"{s}: {n}" for s, n in sorted(corpus.by_source.items()))
    click.echo(f"wrote {output} ({counts or 'empty'})")


def _load_inputs(topology_path: Path, corpus_path: Path):
    topology = parse_topology_graphml(topology_path.read_text())
    corpus = load_corpus(corpus_path)
    return topology, corpus, match_system(topology, corpus)


@main.command()
@click.option("--topology", "topology_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("-o", "--output", type=click.Path(path_type=Path), help="Write the match map as JSON.")
@_tool_errors
def match(topology_path, corpus_path, output):
    """Match every topology element against the corpus."""
    _topology, _corpus, matchmap = _load_inputs(topology_path, corpus_path)
    document = json.dumps(
        {
            "nodes": {
                node_id: sorted(list(m) for m in matches)
                for node_id, matches in matchmap.node_matches.items()
            },
            "edges": {
                edge_id: sorted(list(m) for m in matches)
                for edge_id, matches in matchmap.edge_matches.items()
            },
        },
        indent=2,
        sort_keys=True,
    )
    if output:
        output.write_text(document + "\n")
        click.echo(f"wrote {output}")
    else:
        click.echo(document)


@main.command()
@click.option("--topology", "topology_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of one id per line.")
@_tool_errors
def surface(topology_path, corpus_path, as_json):
    """Compute the attack surface of the topology."""
    topology, _corpus, matchmap = _load_inputs(topology_path, corpus_path)
    found = analysis.attack_surface(topology, matchmap)
    ids = sorted(found.node_ids)
    if as_json:
        click.echo(json.dumps({"node_ids": ids}, indent=2))
    else:
        for node_id in ids:
            click.echo(node_id)


@main.command()
@click.option("--topology", "topology_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--target", required=True)
@click.option("--max-depth", default=10, show_default=True)
@click.option("--max-chains", default=1000, show_default=True)
@_tool_errors
def chains(topology_path, corpus_path, target, max_depth, max_chains):
    """Enumerate exploit chains from the attack surface to a target."""
    topology, _corpus, matchmap = _load_inputs(topology_path, corpus_path)
    result = analysis.exploit_chains(topology, matchmap, target, max_depth, max_chains)
    click.echo(
        json.dumps(
            {
                "target": target,
                "chains": [
                    {"nodes": list(c.nodes), "edges": list(c.edges)}
                    for c in result.chains
                ],
                "truncated": result.truncated,
            },
            indent=2,
        )
    )


@main.command()
@click.option("--topology", "topology_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--seed", default=0, show_default=True, help="Layout seed threaded into the session.")
@click.option("-o", "--output", required=True, type=click.Path(path_type=Path))
@_tool_errors
def bundle(topology_path, spec_path, corpus_path, seed, output):
    """Assemble a project bundle from model documents and a corpus snapshot."""
    project = ProjectBundle(
        topology_doc=topology_path.read_text(),
        spec_doc=spec_path.read_text(),
        corpus_path=str(corpus_path.resolve()),
        corpus_sha256=corpus_sha256(corpus_path),
        layout_seed=seed,
    )
    load_project(project)  # validate everything before writing
    save_bundle(project, output)
    click.echo(f"wrote {output}")


@main.command()
@click.option("--bundle", "bundle_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--format", "fmt", default="json", show_default=True,
              type=click.Choice(["json", "markdown"]))
@click.option("-o", "--output", type=click.Path(path_type=Path))
@_tool_errors
def report(bundle_path, fmt, output):
    """Produce the reportable evidence document for a project bundle."""
    session = load_project(load_bundle(bundle_path), bundle_path)
    document = run_report(session, fmt)
    if output:
        output.write_text(document)
        click.echo(f"wrote {output}")
    else:
        click.echo(document, nl=False)


@main.command()
@click.option("--bundle", "bundle_path", type=click.Path(exists=True, path_type=Path),
              help="Load this bundle into a session at startup.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8330, show_default=True)
@click.option("--seed", default=None, type=int, help="Override the bundle's layout seed.")
@_tool_errors
def serve(bundle_path, host, port, seed):
    """Serve the session API for the dashboard UI."""
    import uvicorn

    from .service import SessionStore, create_app

    store = SessionStore()
    if bundle_path is not None:
        project = load_bundle(bundle_path)
        if seed is not None:
            project.layout_seed = seed
        session = load_project(project, bundle_path)
        store.add(session)
        click.echo(f"session {session.session_id} loaded from {bundle_path}")
    app = create_app(store)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
