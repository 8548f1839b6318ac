"""Systems-theoretic analyses over the topology and specification graphs.

All operations are pure functions over immutable snapshots: the attack
surface, exploit-chain enumeration, requirement violation traces, projection
of curated attack vectors back onto the topology, and what-if attribute
edits that return a new topology value.
"""

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

from .errors import EditError, UnknownIdError
from .graphs import ChannelEdge, ComponentNode, Specification, SystemTopology
from .matching import MatchMap


@dataclass(frozen=True)
class AttackSurface:
    """Entry-point components with at least one matched attack vector."""

    node_ids: frozenset[str]

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.node_ids


@dataclass(frozen=True)
class ExploitChain:
    """A simple path from the attack surface to a target in which every node
    and every edge carries attack-vector evidence."""

    nodes: tuple[str, ...]
    edges: tuple[str, ...]
    evidence: dict[str, frozenset[str]]  # element id -> matched native ids


@dataclass
class ChainSearchResult:
    chains: list[ExploitChain] = field(default_factory=list)
    truncated: bool = False


@dataclass(frozen=True)
class ViolationTrace:
    """Reachability closure of a specification node in both directions."""

    origin: str
    upward: frozenset[str]
    downward: frozenset[str]
    paths: frozenset[tuple[str, str]]


@dataclass(frozen=True)
class ProjectionOverlay:
    """Overlay links from curated attack vectors to every component they match."""

    links: frozenset[tuple[str, str]]  # (native id, topology node id)


@dataclass(frozen=True)
class AttributeEdit:
    """One reversible what-if edit of a node or edge attribute."""

    element_id: str
    action: str  # "add" | "remove"
    key: str
    value: str

    def __post_init__(self):
        if self.action not in ("add", "remove"):
            raise ValueError(f"unknown edit action {self.action!r}")
        if not self.key:
            raise ValueError("attribute key must not be empty")


def attack_surface(topology: SystemTopology, matchmap: MatchMap) -> AttackSurface:
    """Entry points whose node match set is nonempty."""
    return AttackSurface(
        frozenset(
            node_id
            for node_id, node in topology.nodes.items()
            if node.entry_point and matchmap.node_ids_matched(node_id)
        )
    )


def exploit_chains(
    topology: SystemTopology,
    matchmap: MatchMap,
    target: str,
    max_depth: int = 10,
    max_chains: int = 1000,
    cancel: Callable[[], bool] | None = None,
) -> ChainSearchResult:
    """Enumerate evidence-complete simple paths from the attack surface to target.

    Paths follow edge direction. max_depth bounds the node count of a path;
    enumeration is exhaustive up to the limits and emitted in lexicographic
    order of the node-id sequence, with result.truncated set when any limit
    (or the cancel callback) cut the enumeration short. A surface target with
    evidence yields the single-node chain.
    """
    if target not in topology.nodes:
        raise UnknownIdError(f"unknown topology node {target!r}")
    if max_depth < 1 or max_chains < 1:
        raise ValueError("limits must be positive")

    result = ChainSearchResult()
    if not matchmap.node_ids_matched(target):
        return result

    surface = attack_surface(topology, matchmap)
    # Adjacency restricted to evidence-carrying nodes and edges, sorted so the
    # depth-first walk emits chains in lexicographic node-sequence order.
    adjacency: dict[str, list[tuple[str, str]]] = {}
    for edge in topology.edges.values():
        if not matchmap.edge_ids_matched(edge.id):
            continue
        if not matchmap.node_ids_matched(edge.source):
            continue
        if not matchmap.node_ids_matched(edge.target):
            continue
        adjacency.setdefault(edge.source, []).append((edge.target, edge.id))
    for neighbors in adjacency.values():
        neighbors.sort()

    def emit(path: list[str], edge_path: list[str]) -> None:
        evidence: dict[str, frozenset[str]] = {
            node_id: matchmap.node_ids_matched(node_id) for node_id in path
        }
        for edge_id in edge_path:
            evidence[edge_id] = matchmap.edge_ids_matched(edge_id)
        result.chains.append(ExploitChain(tuple(path), tuple(edge_path), evidence))

    def walk(node: str, path: list[str], edge_path: list[str]) -> bool:
        """Depth-first extension; returns False when enumeration must stop."""
        if cancel is not None and cancel():
            result.truncated = True
            return False
        if node == target:
            if len(result.chains) >= max_chains:
                result.truncated = True
                return False
            emit(path, edge_path)
            return True  # a simple path cannot revisit the target
        if len(path) >= max_depth:
            if any(n not in path for n, _ in adjacency.get(node, ())):
                result.truncated = True
            return True
        for neighbor, edge_id in adjacency.get(node, ()):
            if neighbor in path:
                continue
            if not walk(neighbor, path + [neighbor], edge_path + [edge_id]):
                return False
        return True

    for start in sorted(surface.node_ids):
        if not matchmap.node_ids_matched(start):
            continue
        if not walk(start, [start], []):
            break
    return result


def violation_trace(spec: Specification, origin: str) -> ViolationTrace:
    """Reachability closure of a specification node.

    upward collects every node from which the origin is reachable (the
    requirements that degrade when the origin is violated); downward collects
    everything reachable from the origin; paths holds the edges lying on some
    traced path.
    """
    if origin not in spec.nodes:
        raise UnknownIdError(f"unknown specification node {origin!r}")
    forward: dict[str, set[str]] = {n: set() for n in spec.nodes}
    reverse: dict[str, set[str]] = {n: set() for n in spec.nodes}
    for parent, child in spec.edges:
        forward[parent].add(child)
        reverse[child].add(parent)

    def closure(start: str, neighbors: dict[str, set[str]]) -> set[str]:
        seen = {start}
        frontier = [start]
        while frontier:
            for nxt in neighbors[frontier.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    upward = closure(origin, reverse)
    downward = closure(origin, forward)
    paths = frozenset(
        (parent, child)
        for parent, child in spec.edges
        if child in upward or parent in downward
    )
    return ViolationTrace(origin, frozenset(upward), frozenset(downward), paths)


def project_bucket(
    topology: SystemTopology, matchmap: MatchMap, bucket: Iterable[str]
) -> ProjectionOverlay:
    """Link every curated attack vector to each topology node that matches it.

    ``bucket`` is any iterable of native ids (the Bucket type iterates its
    ids). An entry picked while filtering on one component may well link to
    several other components here.
    """
    links: set[tuple[str, str]] = set()
    for native_id in bucket:
        for node_id in matchmap.nodes_matching(native_id):
            links.add((native_id, node_id))
    return ProjectionOverlay(frozenset(links))


def apply_attribute_edit(
    topology: SystemTopology, edit: AttributeEdit
) -> SystemTopology:
    """Apply one attribute edit, returning a new topology value.

    The input topology is left untouched, so prior analysis results stay
    reproducible against it. Adding a key that is already present (or
    removing a pair that is absent) is rejected, which keeps add and remove
    exact inverses for edit-log replay.
    """
    if edit.element_id in topology.nodes:
        node = topology.nodes[edit.element_id]
        new_attrs = _edited(node.attributes, edit)
        new_node = ComponentNode(node.id, node.name, new_attrs, node.entry_point)
        nodes = dict(topology.nodes)
        nodes[node.id] = new_node
        return SystemTopology(nodes, dict(topology.edges))
    if edit.element_id in topology.edges:
        edge = topology.edges[edit.element_id]
        new_attrs = _edited(edge.attributes, edit)
        new_edge = ChannelEdge(edge.source, edge.target, new_attrs, edge.id)
        edges = dict(topology.edges)
        edges[edge.id] = new_edge
        return SystemTopology(dict(topology.nodes), edges)
    raise UnknownIdError(f"unknown topology element {edit.element_id!r}")


def _edited(attributes: dict[str, str], edit: AttributeEdit) -> dict[str, str]:
    updated = dict(attributes)
    if edit.action == "add":
        if edit.key in updated:
            raise EditError(
                f"attribute {edit.key!r} already present on {edit.element_id!r}; remove it first"
            )
        updated[edit.key] = edit.value
    else:
        if updated.get(edit.key) != edit.value:
            raise EditError(
                f"attribute ({edit.key!r}, {edit.value!r}) not present on {edit.element_id!r}"
            )
        del updated[edit.key]
    return updated
