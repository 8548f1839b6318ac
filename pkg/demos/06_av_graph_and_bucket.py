"""Explore the abstracted attack-vector graph and curate a reportable bucket.

Matched vulnerabilities fold into their weakness classes (vertex weight =
consumed count); expanding a class reveals them; filters narrow the space;
the bucket collects what is worth reporting and projects back onto the
topology.
"""

from pathlib import Path

from threatlens import (
    Bucket,
    Query,
    bucket_add,
    bucket_export,
    build_av_graph,
    build_corpus,
    delete_vertices,
    expand_vertex,
    filter_vertices,
    match_system,
    parse_capec,
    parse_cwe,
    parse_nvd_feed,
    parse_topology_graphml,
    project_bucket,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures" / "uas"

topology = parse_topology_graphml((FIXTURES / "uas.graphml").read_text())
corpus = build_corpus(
    parse_capec((FIXTURES / "capec.xml").read_text())
    + parse_cwe((FIXTURES / "cwe.xml").read_text())
    + parse_nvd_feed((FIXTURES / "nvd.json").read_text())
)
matchmap = match_system(topology, corpus)

graph = build_av_graph(matchmap, corpus)
print("visible attack-vector graph:")
for vertex in sorted(graph.visible_vertices(), key=lambda v: v.native_id):
    weight = f" (consumed {vertex.weight})" if vertex.kind == "cwe" else ""
    print(f"  [{vertex.kind}] {vertex.native_id}: {vertex.name}{weight}")

# expanding a weakness class reveals its vulnerabilities
graph = expand_vertex(graph, "CWE-9120")
revealed = [v.native_id for v in graph.visible_vertices() if v.kind == "cve"]
print("\nexpanded CWE-9120 ->", ", ".join(sorted(revealed)))

# filter by the component it violates (as clicking NMEA GPS would)
hits = filter_vertices(graph, Query(component_filter=frozenset({"NMEA GPS"})), matchmap, Bucket())
print("vectors applicable to NMEA GPS:", sorted(hits))

# a vector the analyst rules out can be deleted from the session's graph
graph = delete_vertices(graph, ["CWE-9400"])
print("after deleting CWE-9400:", len(graph.visible_vertices()), "visible vertices")

# curate the bucket and project it over the topology
bucket = bucket_add(Bucket(), "CVE-2020-21001", matchmap, corpus)
bucket = bucket_add(bucket, "CAPEC-9003", matchmap, corpus)
overlay = project_bucket(topology, matchmap, bucket)
print("\nprojection overlay:")
for native_id, node_id in sorted(overlay.links):
    print(f"  {native_id} -> {node_id}")

print("\nbucket as csv:")
print(bucket_export(bucket, "csv"))
