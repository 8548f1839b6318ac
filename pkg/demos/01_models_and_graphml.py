"""Load the UAS system model and its mission specification from GraphML.

The topology is a directed graph of assets; the specification is a
three-band hierarchy (losses/hazards/constraints -> control actions ->
critical components). Both round-trip through GraphML.
"""

from pathlib import Path

from threatlens import (
    parse_spec_graphml,
    parse_topology_graphml,
    serialize_graphml,
    validate,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures" / "uas"

topology = parse_topology_graphml((FIXTURES / "uas.graphml").read_text())
print(f"topology: {len(topology.nodes)} assets, {len(topology.edges)} channels")

entry_points = [n.name for n in topology.nodes.values() if n.entry_point]
print("externally reachable:", ", ".join(sorted(entry_points)))

radio = topology.node("Imagery Radio Module")
print("imagery radio attributes:", radio.attributes)

spec = parse_spec_graphml((FIXTURES / "uas-spec.graphml").read_text())
by_band = {}
for node in spec.nodes.values():
    by_band.setdefault(node.band, []).append(node.label)
for band in ("mission", "functional", "structural"):
    print(f"{band}: {len(by_band[band])} nodes")

# the companion topology lets validate() resolve component references
print("cross-validation diagnostics:", validate(spec, topology) or "none")

# serialization round-trips structurally
assert parse_topology_graphml(serialize_graphml(topology)).nodes == topology.nodes
print("GraphML round-trip: ok")
