import random

import pytest

from conftest import RADIO_MODULES
from oracles import chains_by_brute_force, closure_by_matrix
from threatlens.analysis import (
    AttributeEdit,
    apply_attribute_edit,
    attack_surface,
    exploit_chains,
    project_bucket,
    violation_trace,
)
from threatlens.errors import EditError, UnknownIdError
from threatlens.graphs import (
    ChannelEdge,
    ComponentNode,
    SpecNode,
    Specification,
    SystemTopology,
)
from threatlens.matching import MatchMap, match_system


def line_topology(n=5, entry=(0,)):
    """n nodes in a line, attributed so everything matches when asked."""
    topology = SystemTopology()
    for i in range(n):
        topology.nodes[f"n{i}"] = ComponentNode(f"n{i}", f"n{i}", {}, i in entry)
    for i in range(n - 1):
        edge = ChannelEdge(f"n{i}", f"n{i + 1}")
        topology.edges[edge.id] = edge
    return topology


def full_evidence(topology, native_id="CVE-2020-0001"):
    return MatchMap(
        {n: frozenset({(native_id, "k", "t")}) for n in topology.nodes},
        {e: frozenset({(native_id, "k", "t")}) for e in topology.edges},
    )


def no_evidence(topology):
    return MatchMap(
        {n: frozenset() for n in topology.nodes},
        {e: frozenset() for e in topology.edges},
    )


class TestAttackSurface:
    def test_empty_matchmap(self, uas_topology):
        surface = attack_surface(uas_topology, no_evidence(uas_topology))
        assert surface.node_ids == frozenset()

    def test_uas_surface_is_the_radio_modules(self, uas_topology, uas_matchmap):
        surface = attack_surface(uas_topology, uas_matchmap)
        assert surface.node_ids == frozenset(RADIO_MODULES)

    def test_radios_leave_surface_after_zigbee_removal(
        self, uas_topology, uas_corpus, uas_matchmap
    ):
        topology, matchmap = uas_topology, uas_matchmap
        from threatlens.matching import rematch_incremental

        for radio in RADIO_MODULES:
            topology = apply_attribute_edit(
                topology, AttributeEdit(radio, "remove", "protocol", "ZigBee")
            )
            matchmap = rematch_incremental(matchmap, topology, radio, uas_corpus)
        surface = attack_surface(topology, matchmap)
        assert surface.node_ids == frozenset()
        # The radios keep associated attack vectors on their links even though
        # their own match sets are empty.
        for radio in RADIO_MODULES:
            assert not matchmap.node_ids_matched(radio)
            incident = topology.incident_edges(radio)
            assert any(matchmap.edge_ids_matched(e.id) for e in incident)

    def test_members_are_entry_points(self, uas_topology, uas_matchmap):
        surface = attack_surface(uas_topology, uas_matchmap)
        for node_id in surface.node_ids:
            assert uas_topology.node(node_id).entry_point


class TestExploitChains:
    def test_target_without_evidence(self, uas_topology, uas_matchmap):
        result = exploit_chains(uas_topology, uas_matchmap, "Camera Module")
        assert result.chains == [] and not result.truncated

    def test_line_fixture_equals_oracle(self):
        topology = line_topology(5)
        matchmap = full_evidence(topology)
        result = exploit_chains(topology, matchmap, "n4")
        expected = chains_by_brute_force(topology, matchmap, "n4")
        assert [(c.nodes, c.edges) for c in result.chains] == expected
        assert not result.truncated

    def test_uas_chains_from_every_radio(self, uas_topology, uas_matchmap):
        result = exploit_chains(uas_topology, uas_matchmap, "Primary Application Processor")
        origins = {chain.nodes[0] for chain in result.chains}
        assert origins == set(RADIO_MODULES)

    def test_chain_invariants(self, uas_topology, uas_matchmap):
        surface = attack_surface(uas_topology, uas_matchmap)
        result = exploit_chains(uas_topology, uas_matchmap, "Primary Application Processor")
        for chain in result.chains:
            assert len(set(chain.nodes)) == len(chain.nodes)  # simple path
            assert chain.nodes[0] in surface
            assert chain.nodes[-1] == "Primary Application Processor"
            for node_id in chain.nodes:
                assert chain.evidence[node_id] == uas_matchmap.node_ids_matched(node_id) != frozenset()
            for edge_id in chain.edges:
                assert chain.evidence[edge_id] == uas_matchmap.edge_ids_matched(edge_id) != frozenset()

    def test_lexicographic_order(self):
        topology = line_topology(4, entry=(0, 1))
        # extra edge creating two routes
        edge = ChannelEdge("n0", "n2")
        topology.edges[edge.id] = edge
        matchmap = full_evidence(topology)
        result = exploit_chains(topology, matchmap, "n3")
        sequences = [c.nodes for c in result.chains]
        assert sequences == sorted(sequences)

    def test_surface_target_single_node_chain(self):
        topology = line_topology(3, entry=(0,))
        matchmap = full_evidence(topology)
        result = exploit_chains(topology, matchmap, "n0")
        assert [c.nodes for c in result.chains] == [("n0",)]
        assert [c.edges for c in result.chains] == [()]

    def test_max_chains_truncation(self):
        topology = line_topology(4, entry=(0, 1, 2))
        matchmap = full_evidence(topology)
        unlimited = exploit_chains(topology, matchmap, "n3")
        assert len(unlimited.chains) == 3
        capped = exploit_chains(topology, matchmap, "n3", max_chains=2)
        assert len(capped.chains) == 2
        assert capped.truncated
        assert [c.nodes for c in capped.chains] == [c.nodes for c in unlimited.chains[:2]]

    def test_max_depth_truncation(self):
        topology = line_topology(5)
        matchmap = full_evidence(topology)
        shallow = exploit_chains(topology, matchmap, "n4", max_depth=3)
        assert shallow.chains == []
        assert shallow.truncated

    def test_cancel_callback(self):
        topology = line_topology(5)
        matchmap = full_evidence(topology)
        result = exploit_chains(topology, matchmap, "n4", cancel=lambda: True)
        assert result.truncated and result.chains == []

    def test_unknown_target(self, uas_topology, uas_matchmap):
        with pytest.raises(UnknownIdError):
            exploit_chains(uas_topology, uas_matchmap, "nope")

    def test_edge_without_evidence_blocks_path(self):
        topology = line_topology(3)
        matchmap = full_evidence(topology)
        gutted = MatchMap(
            dict(matchmap.node_matches),
            {**matchmap.edge_matches, "n1->n2": frozenset()},
        )
        result = exploit_chains(topology, gutted, "n2")
        assert result.chains == []

    def test_random_graphs_equal_oracle(self):
        rng = random.Random(20240811)
        for _ in range(60):
            n = rng.randint(2, 9)
            topology = SystemTopology()
            for i in range(n):
                topology.nodes[f"n{i}"] = ComponentNode(
                    f"n{i}", f"n{i}", {}, rng.random() < 0.5
                )
            for i in range(n):
                for j in range(n):
                    if i != j and rng.random() < 0.3:
                        edge = ChannelEdge(f"n{i}", f"n{j}")
                        topology.edges[edge.id] = edge
            matchmap = MatchMap(
                {
                    node: frozenset({("CVE-2020-0001", "k", "t")})
                    if rng.random() < 0.7
                    else frozenset()
                    for node in topology.nodes
                },
                {
                    edge: frozenset({("CVE-2020-0001", "k", "t")})
                    if rng.random() < 0.7
                    else frozenset()
                    for edge in topology.edges
                },
            )
            target = f"n{rng.randrange(n)}"
            result = exploit_chains(
                topology, matchmap, target, max_depth=n, max_chains=10**9
            )
            assert not result.truncated
            expected = chains_by_brute_force(topology, matchmap, target)
            assert [(c.nodes, c.edges) for c in result.chains] == expected


class TestViolationTrace:
    def test_isolated_node(self):
        spec = Specification()
        spec.nodes["x"] = SpecNode("x", "x", "loss")
        trace = violation_trace(spec, "x")
        assert trace.upward == trace.downward == frozenset({"x"})
        assert trace.paths == frozenset()

    def test_uas_imagery_radio_trace(self, uas_spec):
        trace = violation_trace(uas_spec, "Imagery Radio Module")
        assert "CA4.3" in trace.upward
        assert {"H1", "H2", "H3", "L1", "L2", "L3"} <= trace.upward
        constraints_hit = {n for n in trace.upward if uas_spec.nodes[n].level == "constraint"}
        assert constraints_hit == {"SC1", "SC2", "SC3"}  # SC4 is not on a traced path
        assert trace.downward == frozenset({"Imagery Radio Module"})

    def test_downward_from_loss(self, uas_spec):
        trace = violation_trace(uas_spec, "L1")
        downward_expected, _ = closure_by_matrix(uas_spec.nodes, uas_spec.edges)
        assert trace.downward == downward_expected["L1"]

    def test_origin_in_both_sets(self, uas_spec):
        for origin in uas_spec.nodes:
            trace = violation_trace(uas_spec, origin)
            assert origin in trace.upward and origin in trace.downward

    def test_unknown_origin(self, uas_spec):
        with pytest.raises(UnknownIdError):
            violation_trace(uas_spec, "nope")

    def test_random_dags_equal_closure_oracle(self):
        rng = random.Random(77)
        for _ in range(60):
            spec = _random_spec(rng)
            downward, upward = closure_by_matrix(spec.nodes, spec.edges)
            for origin in spec.nodes:
                trace = violation_trace(spec, origin)
                assert trace.downward == downward[origin]
                assert trace.upward == upward[origin]


def _random_spec(rng: random.Random) -> Specification:
    """Random band-valid acyclic specification."""
    spec = Specification()
    mission_levels = ["loss", "hazard", "constraint"]
    mission = [f"m{i}" for i in range(rng.randint(1, 4))]
    functional = [f"f{i}" for i in range(rng.randint(0, 3))]
    structural = [f"s{i}" for i in range(rng.randint(0, 3))]
    for i, node_id in enumerate(mission):
        spec.nodes[node_id] = SpecNode(node_id, node_id, mission_levels[i % 3])
    for node_id in functional:
        spec.nodes[node_id] = SpecNode(node_id, node_id, "control_action")
    for node_id in structural:
        spec.nodes[node_id] = SpecNode(node_id, node_id, "component_ref", component_id="c")
    for i, a in enumerate(mission):
        for b in mission[i + 1 :]:
            if rng.random() < 0.4:
                spec.edges.add((a, b))  # forward within mission keeps it acyclic
        for b in functional:
            if rng.random() < 0.4:
                spec.edges.add((a, b))
    for a in functional:
        for b in structural:
            if rng.random() < 0.4:
                spec.edges.add((a, b))
    return spec


class TestProjection:
    def test_empty_bucket(self, uas_topology, uas_matchmap):
        overlay = project_bucket(uas_topology, uas_matchmap, [])
        assert overlay.links == frozenset()

    def test_entry_matched_by_two_nodes(self, uas_topology, uas_matchmap):
        overlay = project_bucket(uas_topology, uas_matchmap, ["CVE-2021-33001"])
        assert overlay.links == frozenset(
            {
                ("CVE-2021-33001", "Imagery Application Processor"),
                ("CVE-2021-33001", "Primary Application Processor"),
            }
        )

    def test_entry_matching_no_nodes(self, uas_topology, uas_matchmap):
        # CWE-9311 is in the corpus but matched by no component.
        overlay = project_bucket(uas_topology, uas_matchmap, ["CWE-9311"])
        assert overlay.links == frozenset()

    def test_links_verify_against_matchmap(self, uas_topology, uas_matchmap):
        overlay = project_bucket(
            uas_topology, uas_matchmap, ["CVE-2020-21001", "CAPEC-9003"]
        )
        for native_id, node_id in overlay.links:
            assert native_id in uas_matchmap.node_ids_matched(node_id)


class TestAttributeEdit:
    def test_add_then_remove_is_identity(self, uas_topology):
        added = apply_attribute_edit(
            uas_topology, AttributeEdit("Camera Module", "add", "os", "RTOS")
        )
        removed = apply_attribute_edit(
            added, AttributeEdit("Camera Module", "remove", "os", "RTOS")
        )
        assert removed == uas_topology

    def test_remove_zigbee_shrinks_attrs(self, uas_topology):
        edited = apply_attribute_edit(
            uas_topology, AttributeEdit("Imagery Radio Module", "remove", "protocol", "ZigBee")
        )
        assert edited.node("Imagery Radio Module").attributes == {"device": "XBee"}
        # persistence: the original topology still carries the attribute
        assert uas_topology.node("Imagery Radio Module").attributes["protocol"] == "ZigBee"

    def test_unknown_element(self, uas_topology):
        with pytest.raises(UnknownIdError):
            apply_attribute_edit(uas_topology, AttributeEdit("nope", "add", "k", "v"))

    def test_remove_absent_pair(self, uas_topology):
        with pytest.raises(EditError):
            apply_attribute_edit(
                uas_topology, AttributeEdit("Camera Module", "remove", "protocol", "ZigBee")
            )

    def test_add_existing_key(self, uas_topology):
        with pytest.raises(EditError):
            apply_attribute_edit(
                uas_topology, AttributeEdit("Camera Module", "add", "device", "other")
            )

    def test_edge_edit(self, uas_topology):
        edge_id = "Telemetry Radio Module->Primary Application Processor"
        edited = apply_attribute_edit(
            uas_topology, AttributeEdit(edge_id, "add", "shielding", "none")
        )
        assert edited.edge(edge_id).attributes["shielding"] == "none"
        assert "shielding" not in uas_topology.edge(edge_id).attributes

    def test_surface_never_grows_when_removing_attributes(
        self, uas_topology, uas_corpus, uas_matchmap
    ):
        before = attack_surface(uas_topology, uas_matchmap)
        for node_id, node in uas_topology.nodes.items():
            for key, value in node.attributes.items():
                edited = apply_attribute_edit(
                    uas_topology, AttributeEdit(node_id, "remove", key, value)
                )
                after = attack_surface(edited, match_system(edited, uas_corpus))
                assert after.node_ids <= before.node_ids
