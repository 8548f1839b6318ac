"""Enumerate exploit chains: evidence-complete paths from the surface to a target.

A chain is a simple path starting at an attack-surface node in which every
asset and every channel along the way has matched attack vectors.
"""

from pathlib import Path

from threatlens import (
    build_corpus,
    exploit_chains,
    match_system,
    parse_capec,
    parse_cwe,
    parse_nvd_feed,
    parse_topology_graphml,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures" / "uas"

topology = parse_topology_graphml((FIXTURES / "uas.graphml").read_text())
corpus = build_corpus(
    parse_capec((FIXTURES / "capec.xml").read_text())
    + parse_cwe((FIXTURES / "cwe.xml").read_text())
    + parse_nvd_feed((FIXTURES / "nvd.json").read_text())
)
matchmap = match_system(topology, corpus)

target = "Primary Application Processor"
result = exploit_chains(topology, matchmap, target)
print(f"{len(result.chains)} chain(s) to {target!r}"
      f"{' (truncated)' if result.truncated else ''}\n")

for chain in result.chains:
    print("  " + "  ->  ".join(chain.nodes))
    for element, evidence in chain.evidence.items():
        print(f"    {element}: {', '.join(sorted(evidence))}")
    print()
