"""Vertex positioning for the three analysis panes.

The attack-vector and topology panes use a force-directed layout (spring
attraction along edges, inverse-distance repulsion between all pairs, linear
cooling), which clusters related vertices. The specification pane uses a
banded hierarchical layout that pins mission, functional, and structural
nodes into three ordered horizontal bands.

Both layouts are pure functions of their inputs: a fixed seed reproduces the
exact same coordinates within one build, and every produced coordinate is
finite even for coincident inputs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .graphs import MISSION, Specification

# Unit square layout frame; the initial temperature is a tenth of its side.
_SIDE = 1.0
_MIN_DIST = 1e-9

Positions = dict[str, tuple[float, float]]


@dataclass(frozen=True)
class LayoutParams:
    seed: int
    iterations: int = 500
    area_scale: float = 1.0
    cooling: str = "linear"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not (self.area_scale > 0 and math.isfinite(self.area_scale)):
            raise ValueError("area_scale must be positive and finite")
        if self.cooling != "linear":
            raise ValueError(f"unknown cooling schedule {self.cooling!r}")


def fruchterman_reingold(
    vertices: list[str],
    edges: list[tuple[str, str]],
    params: LayoutParams,
) -> Positions:
    """Force-directed layout of an undirected graph.

    Vertices start at seeded uniform positions in the unit square; each
    iteration applies k^2/d repulsion between all pairs and d^2/k attraction
    along edges, caps the displacement at the current temperature, and cools
    linearly to zero. Coincident vertices are separated along a seeded jitter
    direction so no distance ever reaches zero.
    """
    ids = sorted(vertices)
    n = len(ids)
    if n == 0:
        return {}
    index = {vertex_id: i for i, vertex_id in enumerate(ids)}

    rng = np.random.default_rng(params.seed)
    pos = rng.uniform(0.0, _SIDE, size=(n, 2))
    # Per-vertex jitter directions, drawn once so the RNG stream does not
    # depend on how often coincident pairs occur.
    jitter = rng.uniform(-1.0, 1.0, size=(n, 2))
    jitter[np.all(jitter == 0.0, axis=1)] = (1.0, 0.0)

    if n == 1:
        return {ids[0]: (float(pos[0, 0]), float(pos[0, 1]))}

    k = params.area_scale * math.sqrt((_SIDE * _SIDE) / n)
    edge_a = np.array([index[a] for a, b in edges if a in index and b in index], dtype=int)
    edge_b = np.array([index[b] for a, b in edges if a in index and b in index], dtype=int)

    temperature0 = 0.1 * _SIDE
    for iteration in range(params.iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(delta, axis=2)
        coincident = dist < _MIN_DIST
        np.fill_diagonal(coincident, False)
        if coincident.any():
            jdelta = jitter[:, None, :] - jitter[None, :, :]
            delta = np.where(coincident[:, :, None], jdelta, delta)
            dist = np.linalg.norm(delta, axis=2)
        np.fill_diagonal(dist, 1.0)  # self-pairs contribute no force
        dist = np.maximum(dist, _MIN_DIST)

        repulse = (k * k) / dist
        np.fill_diagonal(repulse, 0.0)
        disp = np.einsum("ijk,ij->ik", delta / dist[:, :, None], repulse)

        if edge_a.size:
            edelta = pos[edge_a] - pos[edge_b]
            edist = np.maximum(np.linalg.norm(edelta, axis=1), _MIN_DIST)
            pull = (edelta / edist[:, None]) * ((edist * edist) / k)[:, None]
            np.add.at(disp, edge_a, -pull)
            np.add.at(disp, edge_b, pull)

        temperature = temperature0 * (1.0 - (iteration + 1) / params.iterations)
        length = np.maximum(np.linalg.norm(disp, axis=1), _MIN_DIST)
        step = np.minimum(length, max(temperature, 0.0))
        pos = pos + (disp / length[:, None]) * step[:, None]

    return {vertex_id: (float(pos[i, 0]), float(pos[i, 1])) for vertex_id, i in index.items()}


# Vertical placement inside the mission band keeps losses above hazards above
# constraints; the render flips y so band 0 draws at the top.
_MISSION_ROW = {"loss": 0.0, "hazard": 1.0 / 3.0, "constraint": 2.0 / 3.0}
_BAND_BASE = {MISSION: 0.0, "functional": 1.0, "structural": 2.0}


def banded_hierarchical(spec: Specification) -> Positions:
    """Three-band layout of a specification graph.

    y falls in [0,1) for mission nodes, [1,2) for functional, [2,3) for
    structural. Within a band, x follows the barycenter of each node's
    neighbors in the band above (one crossing-reduction pass); nodes without
    such neighbors go last, and all ties break by node id.
    """
    positions: Positions = {}
    band_members = {band: [] for band in _BAND_BASE}
    for node in spec.nodes.values():
        band_members[node.band].append(node.id)

    x_of: dict[str, float] = {}
    previous_band: str | None = None
    for band in (MISSION, "functional", "structural"):
        members = band_members[band]
        if previous_band is None:
            members.sort()
        else:
            parents_above = {
                m: [p for p in spec.parents(m) if spec.nodes[p].band == previous_band]
                for m in members
            }

            def sort_key(member: str):
                above = parents_above[member]
                if not above:
                    return (1, 0.0, member)
                return (0, sum(x_of[p] for p in above) / len(above), member)

            members.sort(key=sort_key)
        for i, member in enumerate(members):
            x_of[member] = float(i)
            node = spec.nodes[member]
            y = _BAND_BASE[band] + (_MISSION_ROW[node.level] if band == MISSION else 0.0)
            positions[member] = (float(i), y)
        previous_band = band
    return positions
