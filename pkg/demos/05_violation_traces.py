"""Trace requirement violations through the specification hierarchy.

Violating a structural component degrades the control actions that depend on
it and, transitively, safety constraints, hazards, and mission-level losses.
"""

from pathlib import Path

from threatlens import parse_spec_graphml, violation_trace

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures" / "uas"

spec = parse_spec_graphml((FIXTURES / "uas-spec.graphml").read_text())

trace = violation_trace(spec, "Imagery Radio Module")
print("if the Imagery Radio Module is violated, these degrade (by level):")
by_level = {}
for node_id in trace.upward - {trace.origin}:
    by_level.setdefault(spec.nodes[node_id].level, []).append(spec.nodes[node_id].label)
for level in ("control_action", "constraint", "hazard", "loss"):
    print(f"  {level}: {', '.join(sorted(by_level.get(level, [])))}")

# downward direction: everything a loss decomposes into
trace = violation_trace(spec, "L1")
print("\nL1 decomposes into:", ", ".join(sorted(trace.downward - {"L1"})))
