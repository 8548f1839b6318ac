"""Session orchestration: the full analysis pipeline behind the CLI and service.

A session owns one loaded project: the current topology and specification,
the corpus, the match map, the abstracted attack-vector graph, the bucket,
pane layouts, and the analyst's selection and filter state. Every mutation
goes through a single command dispatcher that appends to the bundle's
replayable log, so saving and reloading a bundle reproduces the session
exactly, and every derived artifact always equals a from-scratch
recomputation on the current model.
"""

import json
import uuid
from pathlib import Path

from . import analysis, session as av
from .corpus import Corpus, corpus_sha256, load_corpus
from .errors import Diagnostic, EditError, FormatError, GraphValidationError, UnknownIdError
from .graphs import parse_spec_graphml, parse_topology_graphml, validate
from .layout import LayoutParams, banded_hierarchical, fruchterman_reingold
from .matching import match_system, rematch_incremental
from .project import ProjectBundle, save_bundle

PANES = ("topology", "spec", "av")

# Resource names carried on invalidation events; the UI refetches these.
RESOURCES = (
    "topology",
    "spec",
    "surface",
    "chains",
    "av-graph",
    "av-filter",
    "positions",
    "bucket",
    "projection",
    "selection",
    "report",
)

_MODEL_INVALIDATES = [
    "topology", "surface", "chains", "av-graph", "av-filter",
    "positions", "bucket", "projection", "report",
]


class Session:
    """One analyst session over a loaded project bundle."""

    def __init__(self, bundle: ProjectBundle, corpus: Corpus,
                 diagnostics: list[Diagnostic]):
        self.session_id = uuid.uuid4().hex
        self.bundle = bundle
        self.corpus = corpus
        self.diagnostics = diagnostics
        self.topology = parse_topology_graphml(bundle.topology_doc, diagnostics)
        self.spec = parse_spec_graphml(bundle.spec_doc, diagnostics)
        cross = validate(self.spec, self.topology)
        if cross:
            raise GraphValidationError(cross)
        self.matchmap = match_system(self.topology, self.corpus, bundle.match_config)
        self.avgraph = av.build_av_graph(self.matchmap, self.corpus)
        self.bucket = av.Bucket()
        self.selection: frozenset[tuple[str, str]] = frozenset()
        self.av_component_filter: frozenset[str] | None = None
        self.highlighted: frozenset[str] = frozenset()
        self.query = av.Query()
        self.projected_ids: tuple[str, ...] = ()
        self.positions: dict[str, dict] = {}
        self._relayout()

    # --- derived views -----------------------------------------------------

    def surface(self) -> analysis.AttackSurface:
        return analysis.attack_surface(self.topology, self.matchmap)

    def chains(self, target: str, max_depth: int = 10, max_chains: int = 1000,
               cancel=None) -> analysis.ChainSearchResult:
        return analysis.exploit_chains(
            self.topology, self.matchmap, target, max_depth, max_chains, cancel
        )

    def filtered_av_ids(self) -> set[str]:
        query = av.Query(
            self.query.pattern,
            self.query.fields,
            self.av_component_filter,
            self.query.bucket_only,
        )
        return av.filter_vertices(self.avgraph, query, self.matchmap, self.bucket)

    def projection(self) -> analysis.ProjectionOverlay:
        live = [i for i in self.projected_ids if i not in self.avgraph.deleted]
        return analysis.project_bucket(self.topology, self.matchmap, live)

    # --- command dispatch ----------------------------------------------------

    def apply_command(self, command: dict) -> list[str]:
        """Apply one mutation, append it to the replay log, and name the
        resources it invalidated."""
        invalidated = self._dispatch(command)
        self.bundle.commands.append(command)
        return invalidated

    def _dispatch(self, command: dict) -> list[str]:
        kind = command.get("command")
        if kind == "edit":
            return self._do_edit(command)
        if kind == "delete":
            return self._do_delete(command)
        if kind == "expand":
            return self._do_expand(command)
        if kind == "bucket_add":
            return self._do_bucket_add(command)
        if kind == "bucket_remove":
            return self._do_bucket_remove(command)
        if kind == "select":
            return self._do_select(command)
        if kind == "clear_selection":
            return self._do_clear_selection()
        if kind == "filter":
            return self._do_filter(command)
        if kind == "project":
            return self._do_project(command)
        raise FormatError(f"unknown command {kind!r}")

    def _do_edit(self, command: dict) -> list[str]:
        edit = analysis.AttributeEdit(
            command["element_id"], command["action"], command["key"], command["value"]
        )
        self.topology = analysis.apply_attribute_edit(self.topology, edit)
        self.matchmap = rematch_incremental(
            self.matchmap, self.topology, edit.element_id, self.corpus,
            self.bundle.match_config,
        )
        self._rebuild_avgraph()
        self._rederive_bucket()
        self._relayout()
        return list(_MODEL_INVALIDATES)

    def _do_delete(self, command: dict) -> list[str]:
        self.avgraph = av.delete_vertices(self.avgraph, list(command["ids"]))
        self._relayout(panes=("av",))
        return ["av-graph", "av-filter", "positions", "projection", "report"]

    def _do_expand(self, command: dict) -> list[str]:
        self.avgraph = av.expand_vertex(self.avgraph, command["id"])
        self._relayout(panes=("av",))
        return ["av-graph", "av-filter", "positions", "report"]

    def _do_bucket_add(self, command: dict) -> list[str]:
        native_id = command["id"]
        if native_id in self.avgraph.deleted:
            raise EditError(f"{native_id!r} was deleted in this session")
        self.bucket = av.bucket_add(self.bucket, native_id, self.matchmap, self.corpus)
        return ["bucket", "av-filter", "projection", "report"]

    def _do_bucket_remove(self, command: dict) -> list[str]:
        self.bucket = av.bucket_remove(self.bucket, command["id"])
        self.projected_ids = tuple(i for i in self.projected_ids if i != command["id"])
        return ["bucket", "av-filter", "projection", "report"]

    def _do_select(self, command: dict) -> list[str]:
        pane, selected = command["pane"], command["id"]
        if pane not in PANES:
            raise UnknownIdError(f"unknown pane {pane!r}")
        selection = {(pane, selected)}
        highlighted: frozenset[str] = frozenset()
        component_filter = self.av_component_filter
        if pane == "topology":
            self.topology.node(selected)  # raises for unknown ids
            component_filter = frozenset({selected})
        elif pane == "spec":
            node = self.spec.node(selected)
            if node.level == "component_ref" and node.component_id:
                selection.add(("topology", node.component_id))
                component_filter = frozenset({node.component_id})
            else:
                component_filter = None
        else:
            vertex = self.avgraph.vertex(selected)
            if not vertex.visible:
                raise UnknownIdError(f"{selected!r} is not visible")
            highlighted = self.matchmap.nodes_matching(selected)
        self.selection = frozenset(selection)
        self.av_component_filter = component_filter
        self.highlighted = highlighted
        return ["selection", "av-filter"]

    def _do_clear_selection(self) -> list[str]:
        self.selection = frozenset()
        self.av_component_filter = None
        self.highlighted = frozenset()
        return ["selection", "av-filter"]

    def _do_filter(self, command: dict) -> list[str]:
        self.query = av.Query(
            command.get("pattern", ""),
            tuple(command.get("fields", av.QUERY_FIELDS)),
            None,
            bool(command.get("bucket_only", False)),
        )
        return ["av-filter"]

    def _do_project(self, command: dict) -> list[str]:
        ids = list(command.get("ids", []))
        in_bucket = set(self.bucket.ids())
        for native_id in ids:
            if native_id not in in_bucket:
                raise UnknownIdError(f"{native_id!r} is not in the bucket")
        self.projected_ids = tuple(ids)
        return ["projection"]

    # --- consistency helpers -------------------------------------------------

    def _rebuild_avgraph(self) -> None:
        """Rebuild the attack-vector graph from the current match map while
        preserving the session's deletions and expansions."""
        rebuilt = av.build_av_graph(self.matchmap, self.corpus)
        deletable = [i for i in self.avgraph.deleted if i in rebuilt.vertices]
        if deletable:
            rebuilt = av.delete_vertices(rebuilt, deletable)
        rebuilt = av.AVGraph(
            rebuilt.vertices, rebuilt.consumed, rebuilt.expanded,
            rebuilt.deleted | self.avgraph.deleted,
        )
        for cwe_id in sorted(self.avgraph.expanded):
            if cwe_id in rebuilt.vertices:
                rebuilt = av.expand_vertex(rebuilt, cwe_id)
        self.avgraph = rebuilt

    def _rederive_bucket(self) -> None:
        self.bucket = av.Bucket(
            tuple(
                av.bucket_row(row.native_id, self.matchmap, self.corpus)
                for row in self.bucket.rows
            )
        )

    def _relayout(self, panes: tuple[str, ...] = PANES) -> None:
        params = LayoutParams(seed=self.bundle.layout_seed)
        if "topology" in panes:
            self.positions["topology"] = fruchterman_reingold(
                list(self.topology.nodes),
                [(e.source, e.target) for e in self.topology.edges.values()],
                params,
            )
        if "spec" in panes:
            self.positions["spec"] = banded_hierarchical(self.spec)
        if "av" in panes:
            visible = [v.native_id for v in self.avgraph.visible_vertices()]
            self.positions["av"] = fruchterman_reingold(
                visible, sorted(self.avgraph.edges(self.corpus)), params
            )

    # --- wire snapshots --------------------------------------------------------

    def topology_snapshot(self) -> dict:
        return {
            "nodes": [
                {
                    "id": n.id,
                    "name": n.name,
                    "attributes": dict(n.attributes),
                    "entry_point": n.entry_point,
                }
                for n in sorted(self.topology.nodes.values(), key=lambda n: n.id)
            ],
            "edges": [
                {
                    "id": e.id,
                    "source": e.source,
                    "target": e.target,
                    "attributes": dict(e.attributes),
                }
                for e in sorted(self.topology.edges.values(), key=lambda e: e.id)
            ],
        }

    def spec_snapshot(self) -> dict:
        return {
            "nodes": [
                {
                    "id": n.id,
                    "label": n.label,
                    "level": n.level,
                    "description": n.description,
                    "component_id": n.component_id,
                }
                for n in sorted(self.spec.nodes.values(), key=lambda n: n.id)
            ],
            "edges": sorted([p, c] for p, c in self.spec.edges),
        }

    def av_snapshot(self) -> dict:
        return {
            "vertices": [
                {
                    "id": v.native_id,
                    "kind": v.kind,
                    "name": v.name,
                    "weight": v.weight,
                    "expanded": v.native_id in self.avgraph.expanded,
                }
                for v in sorted(self.avgraph.visible_vertices(), key=lambda v: v.native_id)
            ],
            "edges": sorted([a, b] for a, b in self.avgraph.edges(self.corpus)),
        }

    def surface_snapshot(self) -> dict:
        return {"node_ids": sorted(self.surface().node_ids)}

    def chains_snapshot(self, target: str, max_depth: int = 10,
                        max_chains: int = 1000) -> dict:
        result = self.chains(target, max_depth, max_chains)
        return {
            "target": target,
            "chains": [
                {"nodes": list(c.nodes), "edges": list(c.edges)} for c in result.chains
            ],
            "truncated": result.truncated,
        }

    def bucket_snapshot(self) -> dict:
        return json.loads(av.bucket_export(self.bucket, "json"))

    def selection_snapshot(self) -> dict:
        return {
            "selection": sorted([pane, i] for pane, i in self.selection),
            "av_component_filter": (
                sorted(self.av_component_filter)
                if self.av_component_filter is not None
                else None
            ),
            "highlighted": sorted(self.highlighted),
        }

    def av_filter_snapshot(self) -> dict:
        return {
            "ids": sorted(self.filtered_av_ids()),
            "pattern": self.query.pattern,
            "fields": list(self.query.fields),
            "bucket_only": self.query.bucket_only,
        }

    def projection_snapshot(self) -> dict:
        return {"links": sorted([a, n] for a, n in self.projection().links)}

    def positions_snapshot(self, pane: str) -> dict:
        if pane not in PANES:
            raise UnknownIdError(f"unknown pane {pane!r}")
        return {
            "positions": {
                vertex_id: [x, y]
                for vertex_id, (x, y) in sorted(self.positions[pane].items())
            }
        }

    def entry_snapshot(self, native_id: str) -> dict:
        entry = self.corpus.entries.get(native_id)
        if entry is None:
            raise UnknownIdError(f"no corpus entry {native_id!r}")
        return {
            "id": entry.native_id,
            "source": entry.source,
            "name": entry.name,
            "description": entry.description,
            "severity": entry.severity,
            "relations": [list(r) for r in entry.relations],
            "extra_text": list(entry.extra_text),
        }


def load_project(bundle: ProjectBundle, bundle_path: str | Path | None = None,
                 corpus: Corpus | None = None) -> Session:
    """Run the full pipeline over a bundle and return the live session.

    The corpus snapshot is located via the bundle's reference and verified
    against its pinned content hash (pass ``corpus`` to skip loading). A
    failed load raises without leaving any partial session behind.
    """
    diagnostics: list[Diagnostic] = []
    if corpus is None:
        corpus_path = bundle.resolve_corpus_path(bundle_path)
        if not corpus_path.exists():
            raise FileNotFoundError(f"corpus snapshot {corpus_path} does not exist")
        digest = corpus_sha256(corpus_path)
        if bundle.corpus_sha256 and digest != bundle.corpus_sha256:
            raise FormatError(
                f"corpus snapshot {corpus_path} does not match the bundle's pinned hash"
            )
        corpus = load_corpus(corpus_path)
    replay = list(bundle.commands)
    bundle.commands = []
    session = Session(bundle, corpus, diagnostics)
    for command in replay:
        session.apply_command(command)
    return session


def save_session(session: Session, path: str | Path) -> None:
    """Persist the session as a bundle whose log replays to this exact state."""
    save_bundle(session.bundle, path)


def select(session: Session, pane: str, element_id: str) -> Session:
    """Select an element in one pane, mirroring the linked-pane effects."""
    session.apply_command({"command": "select", "pane": pane, "id": element_id})
    return session


def run_report(session: Session, format: str = "json") -> str:
    """Render the reportable evidence for the current session state.

    Sections: attack surface, exploit chains for each selected topology node,
    violation traces for the specification nodes whose components appear in
    the bucket, the full bucket table, and the replayable edit log. Output is
    fully deterministic for identical sessions.
    """
    surface = session.surface()
    surface_rows = [
        {
            "id": node_id,
            "name": session.topology.node(node_id).name,
            "matched": len(session.matchmap.node_ids_matched(node_id)),
        }
        for node_id in sorted(surface.node_ids)
    ]

    targets = sorted(i for pane, i in session.selection if pane == "topology")
    chain_sections = []
    for target in targets:
        snap = session.chains_snapshot(target)
        chain_sections.append(snap)

    violated = set()
    for row in session.bucket.rows:
        violated |= row.violated_components
    trace_sections = []
    for node in sorted(session.spec.nodes.values(), key=lambda n: n.id):
        if node.level == "component_ref" and node.component_id in violated:
            trace = analysis.violation_trace(session.spec, node.id)
            trace_sections.append(
                {
                    "origin": node.id,
                    "upward": sorted(trace.upward),
                    "downward": sorted(trace.downward),
                }
            )

    document = {
        "format_version": session.bundle.format_version,
        "attack_surface": surface_rows,
        "exploit_chains": chain_sections,
        "violation_traces": trace_sections,
        "bucket": session.bucket_snapshot()["rows"],
        "edit_log": list(session.bundle.commands),
    }
    if format == "json":
        return json.dumps(document, indent=2, sort_keys=True) + "\n"
    if format == "markdown":
        return _markdown_report(document)
    raise FormatError(f"unsupported report format {format!r}")


def _markdown_report(document: dict) -> str:
    lines = ["# Security analysis report", ""]
    lines += ["## Attack surface", ""]
    if document["attack_surface"]:
        for row in document["attack_surface"]:
            lines.append(f"- **{row['name']}** ({row['matched']} matched attack vectors)")
    else:
        lines.append("_empty_")
    lines += ["", "## Exploit chains", ""]
    if document["exploit_chains"]:
        for section in document["exploit_chains"]:
            lines.append(f"### Target: {section['target']}")
            for chain in section["chains"]:
                lines.append("- " + " -> ".join(chain["nodes"]))
            if section["truncated"]:
                lines.append("- _enumeration truncated_")
            lines.append("")
    else:
        lines += ["_no targets selected_", ""]
    lines += ["## Violation traces", ""]
    if document["violation_traces"]:
        for trace in document["violation_traces"]:
            upward = ", ".join(i for i in trace["upward"] if i != trace["origin"])
            lines.append(f"- violating **{trace['origin']}** degrades: {upward or 'nothing'}")
    else:
        lines.append("_bucket names no specification components_")
    lines += ["", "## Bucket", ""]
    if document["bucket"]:
        lines.append("| id | kind | name | violated components |")
        lines.append("| --- | --- | --- | --- |")
        for row in document["bucket"]:
            components = "; ".join(row["violated_components"])
            lines.append(f"| {row['id']} | {row['kind']} | {row['name']} | {components} |")
    else:
        lines.append("_empty_")
    lines += ["", "## Edit log", ""]
    if document["edit_log"]:
        for command in document["edit_log"]:
            lines.append(f"- `{json.dumps(command, sort_keys=True)}`")
    else:
        lines.append("_no commands applied_")
    lines.append("")
    return "\n".join(lines)
