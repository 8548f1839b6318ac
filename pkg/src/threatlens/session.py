"""Abstracted attack-vector graph and the analyst's session-scoped state.

The combined attack-vector graph holds every matched attack pattern and
weakness class; matched vulnerabilities are folded (consumed) into the
weakness classes they instantiate, which keeps the visible graph at
weakness-class scale instead of vulnerability scale. Vulnerabilities with no
weakness mapping are conserved under a synthetic "CWE-unmapped" vertex.

Expansion reveals a weakness's consumed vulnerabilities, deletion prunes
vertices the analyst has judged inapplicable, and the bucket collects the
vectors worth reporting. All operations return new values; the session log
that makes them replayable lives in the shell.
"""

import csv
import io
import json
import re
from dataclasses import dataclass, field, replace

from .corpus import CAPEC, CVE, CWE, Corpus
from .errors import EditError, FormatError, UnknownIdError
from .matching import MatchMap

UNMAPPED_CWE = "CWE-unmapped"

QUERY_FIELDS = ("id", "name", "description", "components")


@dataclass(frozen=True)
class AVVertex:
    """One attack-vector graph vertex.

    weight counts the vulnerabilities a weakness-class vertex has consumed;
    vulnerability vertices stay invisible until their class is expanded.
    """

    native_id: str
    kind: str  # "capec" | "cwe" | "cve"
    name: str
    description: str
    weight: int = 0
    visible: bool = True


@dataclass
class AVGraph:
    """Combined undirected attack-vector graph plus session pruning state."""

    vertices: dict[str, AVVertex] = field(default_factory=dict)
    consumed: dict[str, set[str]] = field(default_factory=dict)  # cwe id -> cve ids
    expanded: frozenset[str] = frozenset()
    deleted: frozenset[str] = frozenset()

    def vertex(self, native_id: str) -> AVVertex:
        try:
            return self.vertices[native_id]
        except KeyError:
            raise UnknownIdError(f"unknown attack-vector vertex {native_id!r}") from None

    def visible_vertices(self) -> list[AVVertex]:
        return [v for v in self.vertices.values() if v.visible]

    def edges(self, corpus: Corpus) -> set[tuple[str, str]]:
        """Undirected edges among visible vertices, as sorted id pairs.

        Derived from corpus relations plus the consumption links (which also
        cover the synthetic unmapped vertex).
        """
        visible = {v.native_id for v in self.vertices.values() if v.visible}
        pairs: set[tuple[str, str]] = set()
        for native_id in visible:
            entry = corpus.entries.get(native_id)
            if entry is not None:
                for _kind, target in entry.relations:
                    if target != native_id and target in visible:
                        pairs.add(tuple(sorted((native_id, target))))
        for cwe_id, cve_ids in self.consumed.items():
            if cwe_id not in visible:
                continue
            for cve_id in cve_ids:
                if cve_id in visible:
                    pairs.add(tuple(sorted((cwe_id, cve_id))))
        return pairs

    def parents_of_cve(self, cve_id: str) -> set[str]:
        return {cwe_id for cwe_id, cve_ids in self.consumed.items() if cve_id in cve_ids}


def build_av_graph(matchmap: MatchMap, corpus: Corpus) -> AVGraph:
    """Fold the matched attack vectors into the abstracted graph.

    Vertices: matched attack patterns; weakness classes that are matched
    themselves or consume at least one matched vulnerability; the synthetic
    unmapped class when needed. Matched vulnerabilities become invisible
    vertices folded into every weakness class they instantiate.
    """
    graph = AVGraph()
    matched = matchmap.all_matched_ids()
    consumed: dict[str, set[str]] = {}
    cwe_ids: set[str] = set()

    for native_id in matched:
        entry = corpus.entries.get(native_id)
        if entry is None:
            continue
        if entry.source == CAPEC:
            graph.vertices[native_id] = AVVertex(
                native_id, "capec", entry.name, entry.description
            )
        elif entry.source == CWE:
            cwe_ids.add(native_id)
        elif entry.source == CVE:
            parents = [
                target
                for kind, target in entry.relations
                if kind == "WeaknessOf"
                and corpus.entries.get(target) is not None
                and corpus.entries[target].source == CWE
            ]
            if not parents:
                parents = [UNMAPPED_CWE]
            for parent in parents:
                consumed.setdefault(parent, set()).add(native_id)
            graph.vertices[native_id] = AVVertex(
                native_id, "cve", entry.name, entry.description, visible=False
            )

    cwe_ids.update(cid for cid in consumed if cid != UNMAPPED_CWE)
    for cwe_id in cwe_ids:
        entry = corpus.entries[cwe_id]
        graph.vertices[cwe_id] = AVVertex(
            cwe_id, "cwe", entry.name, entry.description,
            weight=len(consumed.get(cwe_id, ())),
        )
    if UNMAPPED_CWE in consumed:
        graph.vertices[UNMAPPED_CWE] = AVVertex(
            UNMAPPED_CWE,
            "cwe",
            "Unmapped vulnerabilities",
            "Vulnerabilities with no recorded weakness classification.",
            weight=len(consumed[UNMAPPED_CWE]),
        )
    graph.consumed = consumed
    return graph


def expand_vertex(graph: AVGraph, cwe_id: str) -> AVGraph:
    """Reveal the vulnerabilities consumed by a weakness-class vertex.

    Idempotent; expanding a vertex with nothing consumed changes nothing.
    """
    vertex = graph.vertex(cwe_id)
    if vertex.kind != "cwe":
        raise EditError(f"{cwe_id!r} is not a weakness-class vertex")
    vertices = dict(graph.vertices)
    for cve_id in graph.consumed.get(cwe_id, ()):
        if cve_id in vertices and not vertices[cve_id].visible:
            vertices[cve_id] = replace(vertices[cve_id], visible=True)
    return AVGraph(
        vertices,
        {k: set(v) for k, v in graph.consumed.items()},
        graph.expanded | {cwe_id},
        graph.deleted,
    )


def delete_vertices(graph: AVGraph, ids: list[str] | set[str]) -> AVGraph:
    """Remove vertices (and their incident edges) from the session's graph.

    Deleting a weakness class also drops its consumed vulnerabilities unless
    another class still consumes them; deleting a vulnerability decrements
    its parents' weights. Deleted ids stay excluded until the session resets.
    """
    ids = set(ids)
    for native_id in ids:
        if native_id not in graph.vertices:
            raise UnknownIdError(f"unknown attack-vector vertex {native_id!r}")
    vertices = dict(graph.vertices)
    consumed = {k: set(v) for k, v in graph.consumed.items()}
    doomed_cves: set[str] = set()

    for native_id in ids:
        vertex = vertices.pop(native_id)
        if vertex.kind == "cwe":
            for cve_id in consumed.pop(native_id, set()):
                doomed_cves.add(cve_id)
        elif vertex.kind == "cve":
            for cve_ids in consumed.values():
                cve_ids.discard(native_id)

    # A vulnerability survives its class's deletion only if some other class
    # still consumes it.
    still_consumed = {c for cve_ids in consumed.values() for c in cve_ids}
    removed = set(ids)
    for cve_id in doomed_cves:
        if cve_id not in still_consumed and cve_id in vertices:
            del vertices[cve_id]
            removed.add(cve_id)

    for vertex_id, vertex in list(vertices.items()):
        if vertex.kind == "cwe":
            new_weight = len(consumed.get(vertex_id, ()))
            if new_weight != vertex.weight:
                vertices[vertex_id] = replace(vertex, weight=new_weight)

    return AVGraph(
        vertices,
        consumed,
        graph.expanded - removed,
        graph.deleted | frozenset(removed),
    )


@dataclass(frozen=True)
class Query:
    """One filter-bar query over the attack-vector graph.

    The pattern is a standard Python regular expression, compiled
    case-insensitively at construction; an empty pattern matches everything.
    """

    pattern: str = ""
    fields: tuple[str, ...] = QUERY_FIELDS
    component_filter: frozenset[str] | None = None
    bucket_only: bool = False

    def __post_init__(self):
        unknown = set(self.fields) - set(QUERY_FIELDS)
        if unknown:
            raise ValueError(f"unknown query fields: {sorted(unknown)}")
        if not self.fields:
            raise ValueError("query fields must not be empty")
        re.compile(self.pattern)  # invalid patterns are rejected here, not at filter time

    def regex(self) -> re.Pattern:
        return re.compile(self.pattern, re.IGNORECASE)


def filter_vertices(
    graph: AVGraph, query: Query, matchmap: MatchMap, bucket: "Bucket"
) -> set[str]:
    """Visible vertex ids satisfying every query constraint."""
    regex = query.regex()
    result: set[str] = set()
    for vertex in graph.vertices.values():
        if not vertex.visible:
            continue
        if query.bucket_only and vertex.native_id not in bucket.ids():
            continue
        if query.component_filter is not None:
            hit = any(
                vertex.native_id in matchmap.node_ids_matched(node_id)
                for node_id in query.component_filter
            )
            if not hit:
                continue
        if query.pattern:
            texts = []
            if "id" in query.fields:
                texts.append(vertex.native_id)
            if "name" in query.fields:
                texts.append(vertex.name)
            if "description" in query.fields:
                texts.append(vertex.description)
            if "components" in query.fields:
                texts.extend(matchmap.nodes_matching(vertex.native_id))
            if not any(regex.search(t) for t in texts):
                continue
        result.add(vertex.native_id)
    return result


@dataclass(frozen=True)
class BucketRow:
    native_id: str
    kind: str
    name: str
    description: str
    violated_components: frozenset[str]


@dataclass(frozen=True)
class Bucket:
    """Ordered collection of attack vectors the analyst wants to report."""

    rows: tuple[BucketRow, ...] = ()

    def ids(self) -> tuple[str, ...]:
        return tuple(row.native_id for row in self.rows)

    def __iter__(self):
        return iter(self.ids())

    def __len__(self) -> int:
        return len(self.rows)


_KIND_BY_SOURCE = {CAPEC: "capec", CWE: "cwe", CVE: "cve"}


def bucket_row(native_id: str, matchmap: MatchMap, corpus: Corpus) -> BucketRow:
    """Derive a bucket row from the current match map and corpus."""
    entry = corpus.entries.get(native_id)
    if entry is None:
        raise UnknownIdError(f"no corpus entry {native_id!r}")
    return BucketRow(
        native_id=native_id,
        kind=_KIND_BY_SOURCE[entry.source],
        name=entry.name,
        description=entry.description,
        violated_components=matchmap.nodes_matching(native_id),
    )


def bucket_add(
    bucket: Bucket, native_id: str, matchmap: MatchMap, corpus: Corpus
) -> Bucket:
    """Append an attack vector to the bucket; duplicate adds are rejected."""
    if native_id in bucket.ids():
        raise EditError(f"{native_id!r} is already in the bucket")
    return Bucket(bucket.rows + (bucket_row(native_id, matchmap, corpus),))


def bucket_remove(bucket: Bucket, native_id: str) -> Bucket:
    if native_id not in bucket.ids():
        raise UnknownIdError(f"{native_id!r} is not in the bucket")
    return Bucket(tuple(row for row in bucket.rows if row.native_id != native_id))


def bucket_export(bucket: Bucket, format: str) -> str:
    """Export all rows, in order, as "csv" or "json".

    The csv form quotes every field and joins violated components with
    semicolons; the json form mirrors the same fields structurally.
    """
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, quoting=csv.QUOTE_ALL, lineterminator="\n")
        writer.writerow(["id", "kind", "name", "description", "violated_components"])
        for row in bucket.rows:
            writer.writerow(
                [
                    row.native_id,
                    row.kind,
                    row.name,
                    row.description,
                    ";".join(sorted(row.violated_components)),
                ]
            )
        return out.getvalue()
    if format == "json":
        return json.dumps(
            {
                "rows": [
                    {
                        "id": row.native_id,
                        "kind": row.kind,
                        "name": row.name,
                        "description": row.description,
                        "violated_components": sorted(row.violated_components),
                    }
                    for row in bucket.rows
                ]
            },
            indent=2,
            sort_keys=True,
        )
    raise FormatError(f"unsupported bucket export format {format!r}")
