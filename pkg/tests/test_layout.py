import itertools
import math
import random

import pytest

from threatlens.graphs import SpecNode, Specification
from threatlens.layout import LayoutParams, banded_hierarchical, fruchterman_reingold


class TestParams:
    def test_defaults(self):
        params = LayoutParams(seed=1)
        assert params.iterations == 500
        assert params.area_scale == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            LayoutParams(seed=1, iterations=0)
        with pytest.raises(ValueError):
            LayoutParams(seed=1, area_scale=0.0)
        with pytest.raises(ValueError):
            LayoutParams(seed=1, area_scale=math.inf)
        with pytest.raises(ValueError):
            LayoutParams(seed=1, cooling="exponential")


class TestForceDirected:
    def test_empty_graph(self):
        assert fruchterman_reingold([], [], LayoutParams(seed=7)) == {}

    def test_single_vertex_stays_at_seeded_start(self):
        import numpy as np

        pos = fruchterman_reingold(["only"], [], LayoutParams(seed=42))
        start = np.random.default_rng(42).uniform(0.0, 1.0, size=(1, 2))
        assert pos["only"] == (start[0, 0], start[0, 1])
        assert all(0.0 <= c < 1.0 for c in pos["only"])

    def test_same_seed_bit_identical(self):
        vertices = [f"v{i}" for i in range(12)]
        edges = [(f"v{i}", f"v{(i + 1) % 12}") for i in range(12)]
        a = fruchterman_reingold(vertices, edges, LayoutParams(seed=99))
        b = fruchterman_reingold(vertices, edges, LayoutParams(seed=99))
        assert a == b

    def test_different_seed_differs(self):
        vertices = [f"v{i}" for i in range(6)]
        a = fruchterman_reingold(vertices, [], LayoutParams(seed=1))
        b = fruchterman_reingold(vertices, [], LayoutParams(seed=2))
        assert a != b

    def test_vertex_order_does_not_matter(self):
        vertices = [f"v{i}" for i in range(8)]
        edges = [("v0", "v3"), ("v1", "v2")]
        a = fruchterman_reingold(vertices, edges, LayoutParams(seed=5))
        b = fruchterman_reingold(list(reversed(vertices)), edges, LayoutParams(seed=5))
        assert a == b

    def test_all_coordinates_finite(self):
        vertices = [f"v{i}" for i in range(20)]
        edges = [(a, b) for a, b in itertools.combinations(vertices[:8], 2)]
        pos = fruchterman_reingold(vertices, edges, LayoutParams(seed=3))
        assert all(math.isfinite(x) and math.isfinite(y) for x, y in pos.values())

    def test_finite_under_coincident_inputs(self):
        # Force every start position to coincide by running with one vertex
        # duplicated into clones that the rng seeds identically: simulate by
        # a tiny graph with iterations=1 and identical seeds via area_scale.
        # The guard must keep all outputs finite even when pairs coincide.
        import numpy as np

        from threatlens import layout as layout_module

        original = np.random.default_rng
        try:
            class _FixedRng:
                def __init__(self, seed):
                    self._rng = original(seed)

                def uniform(self, low, high, size):
                    if size[0] > 1 and size == (size[0], 2) and low == 0.0:
                        return np.full(size, 0.5)  # every vertex at the same point
                    return self._rng.uniform(low, high, size)

            np.random.default_rng = lambda seed: _FixedRng(seed)
            pos = fruchterman_reingold(
                ["a", "b", "c"], [("a", "b")], LayoutParams(seed=11, iterations=50)
            )
        finally:
            np.random.default_rng = original
        assert all(math.isfinite(x) and math.isfinite(y) for x, y in pos.values())
        assert len({p for p in pos.values()}) == 3  # the jitter separated them

    def test_disconnected_components_separate(self):
        # Two triangles with no connecting edge: across seeds, the two
        # clusters should end farther apart than any intra-cluster pair.
        left = ["a0", "a1", "a2"]
        right = ["b0", "b1", "b2"]
        edges = [(x, y) for x, y in itertools.combinations(left, 2)]
        edges += [(x, y) for x, y in itertools.combinations(right, 2)]
        wins = 0
        for seed in range(10):
            pos = fruchterman_reingold(left + right, edges, LayoutParams(seed=seed))

            def dist(u, v):
                return math.dist(pos[u], pos[v])

            max_intra = max(
                max(dist(x, y) for x, y in itertools.combinations(left, 2)),
                max(dist(x, y) for x, y in itertools.combinations(right, 2)),
            )
            min_inter = min(dist(x, y) for x in left for y in right)
            if min_inter > max_intra:
                wins += 1
        assert wins >= 8, f"components separated in only {wins}/10 seeds"


def spec_of(levels: dict[str, str], edges=()) -> Specification:
    spec = Specification()
    for node_id, level in levels.items():
        component = "c" if level == "component_ref" else None
        spec.nodes[node_id] = SpecNode(node_id, node_id, level, component_id=component)
    spec.edges = set(edges)
    return spec


class TestBandedLayout:
    def test_empty(self):
        assert banded_hierarchical(Specification()) == {}

    def test_uas_band_ordering(self, uas_spec):
        pos = banded_hierarchical(uas_spec)
        mission_y = [pos[n.id][1] for n in uas_spec.nodes.values() if n.band == "mission"]
        functional_y = [pos[n.id][1] for n in uas_spec.nodes.values() if n.band == "functional"]
        structural_y = [pos[n.id][1] for n in uas_spec.nodes.values() if n.band == "structural"]
        assert max(mission_y) < min(functional_y)
        assert max(functional_y) < min(structural_y)

    def test_band_intervals(self, uas_spec):
        pos = banded_hierarchical(uas_spec)
        for node in uas_spec.nodes.values():
            y = pos[node.id][1]
            low = {"mission": 0.0, "functional": 1.0, "structural": 2.0}[node.band]
            assert low <= y < low + 1.0

    def test_barycenter_ordering(self):
        spec = spec_of(
            {"m0": "loss", "m1": "loss", "f0": "control_action", "f1": "control_action"},
            edges={("m0", "f1"), ("m1", "f0")},
        )
        pos = banded_hierarchical(spec)
        # m0 < m1 in x (id order); children follow their parents' barycenters.
        assert pos["m0"][0] < pos["m1"][0]
        assert pos["f1"][0] < pos["f0"][0]

    def test_barycenter_tie_broken_by_id(self):
        spec = spec_of(
            {
                "m0": "loss",
                "f0": "control_action",
                "sB": "component_ref",
                "sA": "component_ref",
            },
            edges={("m0", "f0"), ("f0", "sB"), ("f0", "sA")},
        )
        pos = banded_hierarchical(spec)
        assert pos["sA"][0] < pos["sB"][0]

    def test_parentless_nodes_go_last(self):
        spec = spec_of(
            {"m0": "loss", "f0": "control_action", "f1": "control_action"},
            edges={("m0", "f1")},
        )
        pos = banded_hierarchical(spec)
        assert pos["f1"][0] < pos["f0"][0]

    def test_random_specs_band_separation(self):
        rng = random.Random(17)
        mission_levels = ["loss", "hazard", "constraint"]
        for _ in range(100):
            levels = {}
            for i in range(rng.randint(1, 5)):
                levels[f"m{i}"] = mission_levels[rng.randrange(3)]
            for i in range(rng.randint(0, 4)):
                levels[f"f{i}"] = "control_action"
            for i in range(rng.randint(0, 4)):
                levels[f"s{i}"] = "component_ref"
            edges = set()
            mission = [n for n in levels if n.startswith("m")]
            functional = [n for n in levels if n.startswith("f")]
            structural = [n for n in levels if n.startswith("s")]
            for a in mission:
                for b in functional:
                    if rng.random() < 0.5:
                        edges.add((a, b))
            for a in functional:
                for b in structural:
                    if rng.random() < 0.5:
                        edges.add((a, b))
            spec = spec_of(levels, edges)
            pos = banded_hierarchical(spec)
            assert set(pos) == set(levels)
            for node_id, level in levels.items():
                band = {"loss": 0, "hazard": 0, "constraint": 0,
                        "control_action": 1, "component_ref": 2}[level]
                assert band <= pos[node_id][1] < band + 1
