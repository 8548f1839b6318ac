/** Contract tests: replaying the recorded API exchange must render the three
 *  panes with the documented color classes, mirror linked selection, and
 *  draw exactly one projection overlay edge per server-reported link. */

import { describe, expect, it } from "vitest";

import {
    AvFilterSnapshot,
    AvSnapshot,
    BucketSnapshot,
    ChainsSnapshot,
    PositionsSnapshot,
    ProjectionSnapshot,
    SelectionSnapshot,
    SpecSnapshot,
    SurfaceSnapshot,
    TopologySnapshot,
} from "../src/model.js";
import {
    COLOR_OF,
    avView,
    bucketView,
    specView,
    topologyView,
    vertexRadius,
} from "../src/viewmodel.js";
import { Exchange } from "./exchange.js";

const BASE = "/sessions/SID";
const exchange = new Exchange();

const topology = exchange.response<TopologySnapshot>("GET", `${BASE}/topology`);
const spec = exchange.response<SpecSnapshot>("GET", `${BASE}/spec`);
const surface = exchange.response<SurfaceSnapshot>("GET", `${BASE}/surface`);
const chains = exchange.response<ChainsSnapshot>(
    "GET", `${BASE}/chains?target=Primary%20Application%20Processor`,
);
const positions = {
    topology: exchange.response<PositionsSnapshot>("GET", `${BASE}/positions/topology`),
    spec: exchange.response<PositionsSnapshot>("GET", `${BASE}/positions/spec`),
    av: exchange.latest<PositionsSnapshot>("GET", `${BASE}/positions/av`),
};
const emptySelection = exchange.response<SelectionSnapshot>("GET", `${BASE}/selection`);
const linkedSelection = exchange.latest<SelectionSnapshot>("GET", `${BASE}/selection`);
const initialFilter = exchange.response<AvFilterSnapshot>("GET", `${BASE}/av-filter`);
const linkedFilter = exchange.latest<AvFilterSnapshot>("GET", `${BASE}/av-filter`);
const emptyProjection = exchange.response<ProjectionSnapshot>("GET", `${BASE}/projection`);
const projection = exchange.latest<ProjectionSnapshot>("GET", `${BASE}/projection`);
const avInitial = exchange.response<AvSnapshot>("GET", `${BASE}/av-graph`);
const avExpanded = exchange.latest<AvSnapshot>("GET", `${BASE}/av-graph`);
const bucket = exchange.latest<BucketSnapshot>("GET", `${BASE}/bucket`);

describe("topology pane", () => {
    const view = topologyView(
        topology, positions.topology, surface, chains, emptySelection, emptyProjection,
    );

    it("colors every attack-surface member red and nothing else", () => {
        const byId = new Map(view.vertices.map((v) => [v.id, v]));
        for (const id of surface.node_ids) {
            expect(byId.get(id)!.colorClass).toBe("surface");
        }
        const reds = view.vertices.filter((v) => v.colorClass === "surface");
        expect(reds.map((v) => v.id).sort()).toEqual([...surface.node_ids].sort());
        expect(COLOR_OF.surface).toBe("#d0312d");
    });

    it("colors exploit-chain nodes and edges yellow", () => {
        const chainNodes = new Set(chains.chains.flatMap((c) => c.nodes));
        const chainEdges = new Set(chains.chains.flatMap((c) => c.edges));
        expect(chainNodes.size).toBeGreaterThan(0);
        for (const vertex of view.vertices) {
            if (chainNodes.has(vertex.id) && !surface.node_ids.includes(vertex.id)) {
                expect(vertex.colorClass).toBe("chain");
            }
        }
        for (const edge of view.edges) {
            expect(edge.colorClass).toBe(chainEdges.has(edge.id) ? "chain" : "plain");
        }
    });

    it("chains originate at every radio module in the recorded scenario", () => {
        const origins = new Set(chains.chains.map((c) => c.nodes[0]));
        expect([...origins].sort()).toEqual([
            "Control Radio Module", "Imagery Radio Module", "Telemetry Radio Module",
        ]);
    });

    it("positions come straight from the server snapshot", () => {
        for (const vertex of view.vertices) {
            const [x, y] = positions.topology.positions[vertex.id];
            expect([vertex.x, vertex.y]).toEqual([x, y]);
        }
    });
});

describe("specification pane", () => {
    const view = specView(spec, positions.spec, emptySelection);

    it("stacks mission above functional above structural after the render flip", () => {
        const yOf = new Map(view.vertices.map((v) => [v.id, v.y]));
        const byLevel = (level: string) =>
            spec.nodes.filter((n) => n.level === level).map((n) => yOf.get(n.id)!);
        const mission = [...byLevel("loss"), ...byLevel("hazard"), ...byLevel("constraint")];
        const functional = byLevel("control_action");
        const structural = byLevel("component_ref");
        expect(Math.min(...mission)).toBeGreaterThan(Math.max(...functional));
        expect(Math.min(...functional)).toBeGreaterThan(Math.max(...structural));
    });

    it("renders one edge per specification edge", () => {
        expect(view.edges.length).toBe(spec.edges.length);
    });
});

describe("attack-vector pane", () => {
    it("colors patterns red, weakness classes blue, expanded CVEs yellow", () => {
        const filterAll: AvFilterSnapshot = {
            ids: avExpanded.vertices.map((v) => v.id),
            pattern: "", fields: ["id"], bucket_only: false,
        };
        const view = avView(avExpanded, positions.av, filterAll, emptySelection);
        const byId = new Map(view.vertices.map((v) => [v.id, v]));
        for (const vertex of avExpanded.vertices) {
            const expected = { capec: "capec", cwe: "cwe", cve: "cve" }[vertex.kind];
            expect(byId.get(vertex.id)!.colorClass).toBe(expected);
        }
        expect(COLOR_OF.capec).toBe(COLOR_OF.surface);   // red
        expect(COLOR_OF.cve).toBe(COLOR_OF.chain);       // yellow
        expect(COLOR_OF.cwe).toBe("#3457d5");            // blue
        // the recorded expansion actually revealed vulnerabilities
        expect(avExpanded.vertices.some((v) => v.kind === "cve")).toBe(true);
        expect(avInitial.vertices.some((v) => v.kind === "cve")).toBe(false);
    });

    it("sizes weakness-class vertices monotonically in consumed count", () => {
        const weights = avExpanded.vertices.filter((v) => v.kind === "cwe").map((v) => v.weight);
        const sorted = [...new Set(weights)].sort((a, b) => a - b);
        for (let i = 1; i < sorted.length; i++) {
            expect(vertexRadius(sorted[i])).toBeGreaterThan(vertexRadius(sorted[i - 1]));
        }
        expect(new Set(weights).size).toBeGreaterThan(1); // fixture exercises the rule
    });

    it("draws only vertices passing the server-side filter", () => {
        const view = avView(avInitial, positions.av, linkedFilter, emptySelection);
        expect(view.vertices.map((v) => v.id).sort()).toEqual([...linkedFilter.ids].sort());
        for (const edge of view.edges) {
            const [a, b] = edge.id.split("--");
            expect(linkedFilter.ids).toContain(a);
            expect(linkedFilter.ids).toContain(b);
        }
    });
});

describe("linked selection", () => {
    it("selecting the spec's component reference selects the topology node too", () => {
        const pairs = linkedSelection.selection.map(([pane, id]) => `${pane}:${id}`);
        expect(pairs).toContain("spec:Imagery Radio Module");
        expect(pairs).toContain("topology:Imagery Radio Module");
        expect(linkedSelection.av_component_filter).toEqual(["Imagery Radio Module"]);
    });

    it("marks the linked topology vertex selected in the render model", () => {
        const view = topologyView(
            topology, positions.topology, surface, null, linkedSelection, emptyProjection,
        );
        const radio = view.vertices.find((v) => v.id === "Imagery Radio Module")!;
        expect(radio.selected).toBe(true);
        expect(view.vertices.filter((v) => v.selected)).toHaveLength(1);
    });

    it("narrows the AV pane to the component's matched vectors", () => {
        expect(initialFilter.ids.length).toBeGreaterThan(linkedFilter.ids.length);
        const view = avView(avInitial, positions.av, linkedFilter, emptySelection);
        expect(view.vertices.map((v) => v.id)).toEqual(["CAPEC-9001"]);
    });
});

describe("bucket and projection", () => {
    it("keeps server row order and color-codes rows like the AV graph", () => {
        const rows = bucketView(bucket);
        expect(rows.map((r) => r.id)).toEqual(["CVE-2020-21001", "CVE-2021-33001"]);
        for (const row of rows) {
            expect(row.colorClass).toBe(row.kind);
        }
    });

    it("draws exactly one overlay edge per projection link", () => {
        const view = topologyView(
            topology, positions.topology, surface, null, emptySelection, projection,
        );
        expect(view.overlay).toHaveLength(projection.links.length);
        expect(projection.links.length).toBe(5); // 3 radios + 2 processors
        const rendered = new Set(view.overlay.map((e) => e.id));
        for (const [vectorId, nodeId] of projection.links) {
            expect(rendered.has(`${vectorId}->${nodeId}`)).toBe(true);
        }
    });

    it("overlay edges end at the violated component's position", () => {
        const view = topologyView(
            topology, positions.topology, surface, null, emptySelection, projection,
        );
        for (const edge of view.overlay) {
            const nodeId = edge.id.split("->")[1];
            expect(edge.to).toEqual(positions.topology.positions[nodeId]);
        }
    });

    it("an empty projection draws nothing", () => {
        const view = topologyView(
            topology, positions.topology, surface, null, emptySelection, emptyProjection,
        );
        expect(view.overlay).toHaveLength(0);
    });
});
