"""Map model attributes onto recorded attack vectors and compute the surface.

Every attribute value (protocol, device, os, software) is matched against
the corpus text; entry points with matches form the attack surface. Editing
an attribute is a what-if: the surface shrinks, but evidence can remain on
the element's links.
"""

from pathlib import Path

from threatlens import (
    AttributeEdit,
    apply_attribute_edit,
    attack_surface,
    build_corpus,
    match_system,
    parse_capec,
    parse_cwe,
    parse_nvd_feed,
    parse_topology_graphml,
    rematch_incremental,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures" / "uas"

topology = parse_topology_graphml((FIXTURES / "uas.graphml").read_text())
corpus = build_corpus(
    parse_capec((FIXTURES / "capec.xml").read_text())
    + parse_cwe((FIXTURES / "cwe.xml").read_text())
    + parse_nvd_feed((FIXTURES / "nvd.json").read_text())
)

matchmap = match_system(topology, corpus)
for node_id in sorted(topology.nodes):
    matched = sorted(matchmap.node_ids_matched(node_id))
    if matched:
        print(f"{node_id}: {', '.join(matched)}")

surface = attack_surface(topology, matchmap)
print("\nattack surface:", sorted(surface.node_ids))

# what-if: swap out the ZigBee radios
print("\nremoving the ZigBee attribute from every radio module...")
for radio in sorted(surface.node_ids):
    topology = apply_attribute_edit(topology, AttributeEdit(radio, "remove", "protocol", "ZigBee"))
    matchmap = rematch_incremental(matchmap, topology, radio, corpus)

surface_after = attack_surface(topology, matchmap)
print("attack surface now:", sorted(surface_after.node_ids) or "empty")
for radio in ("Imagery Radio Module", "Telemetry Radio Module", "Control Radio Module"):
    links = [e.id for e in topology.incident_edges(radio) if matchmap.edge_ids_matched(e.id)]
    print(f"{radio}: no node matches, but {len(links)} link(s) still carry evidence")
