"""Compute pane layouts: force-directed for graphs, banded for the hierarchy.

Layouts are pure functions of (graph, seed): the same seed always gives the
same coordinates, so saved projects re-render identically.
"""

from pathlib import Path

from threatlens import (
    LayoutParams,
    banded_hierarchical,
    fruchterman_reingold,
    parse_spec_graphml,
    parse_topology_graphml,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures" / "uas"

topology = parse_topology_graphml((FIXTURES / "uas.graphml").read_text())
spec = parse_spec_graphml((FIXTURES / "uas-spec.graphml").read_text())

params = LayoutParams(seed=7)
positions = fruchterman_reingold(
    list(topology.nodes),
    [(e.source, e.target) for e in topology.edges.values()],
    params,
)
print("force-directed topology layout (seed 7):")
for node_id, (x, y) in sorted(positions.items())[:5]:
    print(f"  {node_id}: ({x:+.3f}, {y:+.3f})")
print("  ...")

assert positions == fruchterman_reingold(
    list(topology.nodes),
    [(e.source, e.target) for e in topology.edges.values()],
    params,
), "same seed must reproduce the same layout"
print("determinism: ok\n")

banded = banded_hierarchical(spec)
print("banded specification layout (y encodes the band):")
for node_id, (x, y) in sorted(banded.items(), key=lambda kv: (kv[1][1], kv[1][0])):
    print(f"  y={y:.2f} x={x:.0f}  {spec.nodes[node_id].label}")
