"""System topology and requirement-specification graph models with GraphML I/O.

Two graph kinds are modeled:

* a directed system topology whose vertices are the assets of the design and
  whose edges are dependence relationships between assets, and
* a three-band requirement hierarchy (mission / functional / structural)
  linking losses, hazards, and constraints down through control actions to
  critical components of the topology.

Both parse from and serialize to GraphML 1.0 using a fixed key convention:
node data keys ``name``, ``attrs``, ``entry_point`` plus (specification only)
``level`` and ``component_id``; edge data key ``attrs``. The ``attrs`` value
is a flat ``k=v;k=v`` string; literal ``\\``, ``;`` and ``=`` are escaped
with a backslash.
"""

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import Diagnostic, GraphValidationError, ParseError, UnknownIdError

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"

# Node data keys understood by the parsers; anything else is ignored with a
# warning diagnostic.
TOPOLOGY_NODE_KEYS = ("name", "attrs", "entry_point")
SPEC_NODE_KEYS = ("name", "attrs", "level", "component_id", "description")
EDGE_KEYS = ("attrs",)

SPEC_LEVELS = ("loss", "hazard", "constraint", "control_action", "component_ref")

MISSION, FUNCTIONAL, STRUCTURAL = "mission", "functional", "structural"
BAND_ORDER = (MISSION, FUNCTIONAL, STRUCTURAL)
BAND_OF_LEVEL = {
    "loss": MISSION,
    "hazard": MISSION,
    "constraint": MISSION,
    "control_action": FUNCTIONAL,
    "component_ref": STRUCTURAL,
}


@dataclass
class ComponentNode:
    """An asset of the system under design."""

    id: str
    name: str
    attributes: dict[str, str] = field(default_factory=dict)
    entry_point: bool = False


@dataclass
class ChannelEdge:
    """A directed dependence between two assets, optionally attributed."""

    source: str
    target: str
    attributes: dict[str, str] = field(default_factory=dict)
    id: str = ""

    def __post_init__(self):
        if not self.id:
            self.id = f"{self.source}->{self.target}"


@dataclass
class SystemTopology:
    """Directed graph of assets and their dependence relationships."""

    nodes: dict[str, ComponentNode] = field(default_factory=dict)
    edges: dict[str, ChannelEdge] = field(default_factory=dict)

    def node(self, node_id: str) -> ComponentNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownIdError(f"unknown topology node {node_id!r}") from None

    def edge(self, edge_id: str) -> ChannelEdge:
        try:
            return self.edges[edge_id]
        except KeyError:
            raise UnknownIdError(f"unknown topology edge {edge_id!r}") from None

    def out_edges(self, node_id: str) -> list[ChannelEdge]:
        return [e for e in self.edges.values() if e.source == node_id]

    def in_edges(self, node_id: str) -> list[ChannelEdge]:
        return [e for e in self.edges.values() if e.target == node_id]

    def incident_edges(self, node_id: str) -> list[ChannelEdge]:
        return [e for e in self.edges.values() if node_id in (e.source, e.target)]


@dataclass
class SpecNode:
    """One requirement-hierarchy element (loss, hazard, constraint, control
    action, or reference to a critical topology component)."""

    id: str
    label: str
    level: str
    description: str = ""
    component_id: str | None = None

    @property
    def band(self) -> str:
        return BAND_OF_LEVEL[self.level]


@dataclass
class Specification:
    """Acyclic three-band requirement hierarchy.

    Edges run downward: parent -> child, where the child is in the same band
    (mission only) or the next band down.
    """

    nodes: dict[str, SpecNode] = field(default_factory=dict)
    edges: set[tuple[str, str]] = field(default_factory=set)

    def node(self, node_id: str) -> SpecNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownIdError(f"unknown specification node {node_id!r}") from None

    def children(self, node_id: str) -> list[str]:
        return sorted(c for p, c in self.edges if p == node_id)

    def parents(self, node_id: str) -> list[str]:
        return sorted(p for p, c in self.edges if c == node_id)


# --- attrs string encoding -------------------------------------------------

_ESCAPES = {"\\": "\\\\", ";": "\\;", "=": "\\="}


def encode_attrs(attributes: dict[str, str]) -> str:
    """Flatten an attribute map to the ``k=v;k=v`` wire string."""

    def esc(s: str) -> str:
        return "".join(_ESCAPES.get(ch, ch) for ch in s)

    return ";".join(f"{esc(k)}={esc(v)}" for k, v in attributes.items())


def decode_attrs(text: str) -> dict[str, str]:
    """Parse a ``k=v;k=v`` string back into an attribute map."""
    attributes: dict[str, str] = {}
    if not text:
        return attributes
    key, value, in_value = [], [], False
    parts = []

    def flush():
        parts.append(("".join(key), "".join(value), in_value))
        key.clear()
        value.clear()

    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            (value if in_value else key).append(text[i + 1])
            i += 2
            continue
        if ch == "=" and not in_value:
            in_value = True
        elif ch == ";":
            flush()
            in_value = False
        else:
            (value if in_value else key).append(ch)
        i += 1
    flush()
    for k, v, had_value in parts:
        if not k and not had_value:
            continue
        if not k:
            raise ParseError(f"attribute with empty key in {text!r}")
        attributes[k] = v
    return attributes


# --- GraphML reading -------------------------------------------------------


def _local(tag: str) -> str:
    """Strip a namespace qualifier from an element tag."""
    return tag.rsplit("}", 1)[-1]


def _parse_xml(text: str) -> ET.Element:
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        line = exc.position[0] if exc.position else None
        raise ParseError(f"malformed XML: {exc.msg.split(':')[0]}", line=line) from exc


def _iter_local(element: ET.Element, name: str):
    for child in element.iter():
        if _local(child.tag) == name:
            yield child


def _read_graphml(
    text: str,
    known_keys: tuple[str, ...],
    diagnostics: list[Diagnostic] | None,
):
    """Shared GraphML walk returning raw (nodes, edges) dictionaries."""
    root = _parse_xml(text)
    if _local(root.tag) != "graphml":
        raise ParseError(f"expected <graphml> document root, found <{_local(root.tag)}>")

    # Key declarations map the document's key ids onto our attr names.
    key_names: dict[str, str] = {}
    for key_el in _iter_local(root, "key"):
        key_id = key_el.get("id")
        attr_name = key_el.get("attr.name")
        if key_id and attr_name:
            key_names[key_id] = attr_name

    def data_of(element: ET.Element, subject: str) -> dict[str, str]:
        data: dict[str, str] = {}
        for data_el in element:
            if _local(data_el.tag) != "data":
                continue
            ref = data_el.get("key", "")
            name = key_names.get(ref, ref)
            if name not in known_keys:
                if diagnostics is not None:
                    diagnostics.append(
                        Diagnostic("warning", f"ignoring unknown GraphML key {ref!r}", subject)
                    )
                continue
            data[name] = data_el.text or ""
        return data

    nodes, edges = [], []
    for graph_el in _iter_local(root, "graph"):
        for el in graph_el:
            tag = _local(el.tag)
            if tag == "node":
                node_id = el.get("id")
                if node_id is None or node_id == "":
                    raise GraphValidationError(
                        [Diagnostic("error", "node without an id attribute")]
                    )
                nodes.append((node_id, data_of(el, node_id)))
            elif tag == "edge":
                source, target = el.get("source"), el.get("target")
                if not source or not target:
                    raise GraphValidationError(
                        [Diagnostic("error", "edge missing source or target")]
                    )
                edges.append((el.get("id"), source, target, data_of(el, f"{source}->{target}")))
        break  # one graph per document
    return nodes, edges


def parse_topology_graphml(
    text: str, diagnostics: list[Diagnostic] | None = None
) -> SystemTopology:
    """Parse a system-topology GraphML document.

    Unknown data keys are skipped with a warning appended to ``diagnostics``.
    Raises ParseError for malformed XML and GraphValidationError for duplicate
    node ids, dangling edge endpoints, self-loops, or duplicate edges.
    """
    raw_nodes, raw_edges = _read_graphml(text, TOPOLOGY_NODE_KEYS, diagnostics)
    errors: list[Diagnostic] = []
    topology = SystemTopology()
    for node_id, data in raw_nodes:
        if node_id in topology.nodes:
            errors.append(Diagnostic("error", "duplicate node id", node_id))
            continue
        topology.nodes[node_id] = ComponentNode(
            id=node_id,
            name=data.get("name", node_id),
            attributes=decode_attrs(data.get("attrs", "")),
            entry_point=data.get("entry_point", "false").strip().lower() == "true",
        )
    for edge_id, source, target, data in raw_edges:
        for endpoint in (source, target):
            if endpoint not in topology.nodes:
                errors.append(Diagnostic("error", "edge endpoint does not exist", endpoint))
        if source == target:
            errors.append(Diagnostic("error", "self-loop rejected", source))
            continue
        edge = ChannelEdge(
            source=source,
            target=target,
            attributes=decode_attrs(data.get("attrs", "")),
            id=edge_id or "",
        )
        if edge.id in topology.edges:
            errors.append(Diagnostic("error", "duplicate edge", edge.id))
            continue
        topology.edges[edge.id] = edge
    if errors:
        raise GraphValidationError(errors)
    return topology


def parse_spec_graphml(
    text: str, diagnostics: list[Diagnostic] | None = None
) -> Specification:
    """Parse a specification GraphML document and verify band rules.

    Every node must carry a ``level`` key. Raises GraphValidationError for
    unknown levels, upward or band-skipping edges, or cycles.
    """
    raw_nodes, raw_edges = _read_graphml(text, SPEC_NODE_KEYS, diagnostics)
    errors: list[Diagnostic] = []
    spec = Specification()
    for node_id, data in raw_nodes:
        if node_id in spec.nodes:
            errors.append(Diagnostic("error", "duplicate node id", node_id))
            continue
        level = data.get("level", "").strip()
        if level not in SPEC_LEVELS:
            errors.append(Diagnostic("error", f"unknown level {level!r}", node_id))
            continue
        spec.nodes[node_id] = SpecNode(
            id=node_id,
            label=data.get("name", node_id),
            level=level,
            description=data.get("description", ""),
            component_id=data.get("component_id") or None,
        )
    for edge_id, source, target, _data in raw_edges:
        if source not in spec.nodes or target not in spec.nodes:
            missing = source if source not in spec.nodes else target
            errors.append(Diagnostic("error", "edge endpoint does not exist", missing))
            continue
        spec.edges.add((source, target))
    if errors:
        raise GraphValidationError(errors)
    errors = validate(spec)
    if errors:
        raise GraphValidationError(errors)
    return spec


# --- GraphML writing -------------------------------------------------------


def serialize_graphml(graph: SystemTopology | Specification) -> str:
    """Serialize a topology or specification to GraphML.

    The output round-trips: parsing it back yields a structurally equal graph.
    Nodes and edges are emitted in sorted id order so identical graphs always
    produce identical documents.
    """
    if isinstance(graph, SystemTopology):
        return _serialize_topology(graph)
    if isinstance(graph, Specification):
        return _serialize_spec(graph)
    raise TypeError(f"cannot serialize {type(graph).__name__}")


def _document(node_keys: list[str], edge_keys: list[str]):
    root = ET.Element("graphml", xmlns=GRAPHML_NS)
    key_ids: dict[tuple[str, str], str] = {}
    for domain, names in (("node", node_keys), ("edge", edge_keys)):
        for name in names:
            key_id = f"d{len(key_ids)}"
            key_ids[(domain, name)] = key_id
            ET.SubElement(
                root, "key", id=key_id, attrib={"for": domain},
                **{"attr.name": name, "attr.type": "string"},
            )
    graph_el = ET.SubElement(root, "graph", id="G", edgedefault="directed")
    return root, graph_el, key_ids


def _data(parent: ET.Element, key_id: str, value: str):
    el = ET.SubElement(parent, "data", key=key_id)
    el.text = value


def _serialize_topology(topology: SystemTopology) -> str:
    root, graph_el, keys = _document(list(TOPOLOGY_NODE_KEYS), list(EDGE_KEYS))
    for node_id in sorted(topology.nodes):
        node = topology.nodes[node_id]
        el = ET.SubElement(graph_el, "node", id=node.id)
        _data(el, keys[("node", "name")], node.name)
        if node.attributes:
            _data(el, keys[("node", "attrs")], encode_attrs(node.attributes))
        if node.entry_point:
            _data(el, keys[("node", "entry_point")], "true")
    for edge_id in sorted(topology.edges):
        edge = topology.edges[edge_id]
        el = ET.SubElement(graph_el, "edge", id=edge.id, source=edge.source, target=edge.target)
        if edge.attributes:
            _data(el, keys[("edge", "attrs")], encode_attrs(edge.attributes))
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True)


def _serialize_spec(spec: Specification) -> str:
    root, graph_el, keys = _document(
        ["name", "level", "description", "component_id"], []
    )
    for node_id in sorted(spec.nodes):
        node = spec.nodes[node_id]
        el = ET.SubElement(graph_el, "node", id=node.id)
        _data(el, keys[("node", "name")], node.label)
        _data(el, keys[("node", "level")], node.level)
        if node.description:
            _data(el, keys[("node", "description")], node.description)
        if node.component_id:
            _data(el, keys[("node", "component_id")], node.component_id)
    for source, target in sorted(spec.edges):
        ET.SubElement(graph_el, "edge", source=source, target=target)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True)


# --- validation ------------------------------------------------------------


def validate(
    graph: SystemTopology | Specification,
    topology: SystemTopology | None = None,
) -> list[Diagnostic]:
    """Check all structural invariants; an empty list means the graph is valid.

    For specifications, pass the companion ``topology`` to also resolve
    component references against it.
    """
    if isinstance(graph, SystemTopology):
        return _validate_topology(graph)
    if isinstance(graph, Specification):
        return _validate_spec(graph, topology)
    raise TypeError(f"cannot validate {type(graph).__name__}")


def _validate_topology(topology: SystemTopology) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for node_id, node in topology.nodes.items():
        if not node_id:
            out.append(Diagnostic("error", "empty node id"))
        if node.id != node_id:
            out.append(Diagnostic("error", "node keyed under a different id", node_id))
        for key in node.attributes:
            if not key:
                out.append(Diagnostic("error", "empty attribute key", node_id))
    seen_pairs: set[tuple[str, str]] = set()
    for edge in topology.edges.values():
        for endpoint in (edge.source, edge.target):
            if endpoint not in topology.nodes:
                out.append(Diagnostic("error", "edge endpoint does not exist", endpoint))
        if edge.source == edge.target:
            out.append(Diagnostic("error", "self-loop rejected", edge.id))
        if (edge.source, edge.target) in seen_pairs:
            out.append(Diagnostic("error", "duplicate edge", edge.id))
        seen_pairs.add((edge.source, edge.target))
        for key in edge.attributes:
            if not key:
                out.append(Diagnostic("error", "empty attribute key", edge.id))
    return out


def _validate_spec(
    spec: Specification, topology: SystemTopology | None
) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for node_id, node in spec.nodes.items():
        if node.level not in SPEC_LEVELS:
            out.append(Diagnostic("error", f"unknown level {node.level!r}", node_id))
            continue
        if not node.label:
            out.append(Diagnostic("error", "empty label", node_id))
        if node.level == "component_ref" and not node.component_id:
            out.append(Diagnostic("error", "component_ref without component_id", node_id))
        if node.level != "component_ref" and node.component_id:
            out.append(Diagnostic("error", "component_id on a non-component_ref node", node_id))
        if (
            topology is not None
            and node.level == "component_ref"
            and node.component_id
            and node.component_id not in topology.nodes
        ):
            out.append(
                Diagnostic(
                    "error",
                    f"component_id {node.component_id!r} does not resolve",
                    node_id,
                )
            )
    band_index = {band: i for i, band in enumerate(BAND_ORDER)}
    for source, target in sorted(spec.edges):
        if source not in spec.nodes or target not in spec.nodes:
            missing = source if source not in spec.nodes else target
            out.append(Diagnostic("error", "edge endpoint does not exist", missing))
            continue
        src_band = band_index[spec.nodes[source].band]
        dst_band = band_index[spec.nodes[target].band]
        if dst_band < src_band:
            out.append(Diagnostic("error", "upward edge", f"{source}->{target}"))
        elif dst_band == src_band and spec.nodes[source].band != MISSION:
            out.append(
                Diagnostic("error", "intra-band edge outside mission band", f"{source}->{target}")
            )
        elif dst_band - src_band > 1:
            out.append(Diagnostic("error", "edge skips a band", f"{source}->{target}"))
    if not _is_acyclic(spec):
        out.append(Diagnostic("error", "specification contains a cycle"))
    return out


def _is_acyclic(spec: Specification) -> bool:
    """Kahn's topological sort; True when every node can be ordered."""
    indegree = {node_id: 0 for node_id in spec.nodes}
    for _source, target in spec.edges:
        if target in indegree:
            indegree[target] += 1
    ready = [n for n, d in indegree.items() if d == 0]
    ordered = 0
    while ready:
        node = ready.pop()
        ordered += 1
        for source, target in spec.edges:
            if source != node or target not in indegree:
                continue
            indegree[target] -= 1
            if indegree[target] == 0:
                ready.append(target)
    return ordered == len(spec.nodes)
