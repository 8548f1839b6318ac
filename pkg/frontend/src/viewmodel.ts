/** Pure derivation of render models from server snapshots.
 *
 *  Every color class, radius, filter decision, and overlay edge below comes
 *  straight from server-provided flags; the dashboard performs no analysis
 *  of its own. Keeping this pure lets the contract tests replay a recorded
 *  API exchange and assert on exactly what would be drawn.
 */

import {
    AvFilterSnapshot,
    AvSnapshot,
    BucketRow,
    BucketSnapshot,
    ChainsSnapshot,
    PositionsSnapshot,
    ProjectionSnapshot,
    SelectionSnapshot,
    SpecSnapshot,
    SurfaceSnapshot,
    TopologySnapshot,
} from "./model.js";

/** Rendered color classes. The mapping to actual colors lives in one place
 *  so panes and the bucket table stay consistent. */
export type ColorClass =
    | "surface"   // attack-surface members (red)
    | "chain"     // exploit-chain elements (yellow)
    | "capec"     // attack patterns (red)
    | "cwe"       // weakness classes (blue)
    | "cve"       // expanded vulnerabilities (yellow)
    | "mission"
    | "functional"
    | "structural"
    | "plain";

export const COLOR_OF: Record<ColorClass, string> = {
    surface: "#d0312d",
    chain: "#f2c231",
    capec: "#d0312d",
    cwe: "#3457d5",
    cve: "#f2c231",
    mission: "#7a5195",
    functional: "#3457d5",
    structural: "#2e7d32",
    plain: "#9aa0a6",
};

export interface VertexView {
    id: string;
    label: string;
    x: number;
    y: number;
    radius: number;
    colorClass: ColorClass;
    selected: boolean;
    highlighted: boolean;
}

export interface EdgeView {
    id: string;
    from: [number, number];
    to: [number, number];
    colorClass: ColorClass;
}

export interface PaneView {
    vertices: VertexView[];
    edges: EdgeView[];
    overlay: EdgeView[];
}

const NODE_RADIUS = 8;

function selectedIds(selection: SelectionSnapshot, pane: string): Set<string> {
    return new Set(selection.selection.filter(([p]) => p === pane).map(([, id]) => id));
}

/** System-topology pane: red attack surface, yellow exploit-chain elements,
 *  and (when the analyst projects the bucket) overlay edges from attack
 *  vectors to every component they can violate. */
export function topologyView(
    topology: TopologySnapshot,
    positions: PositionsSnapshot,
    surface: SurfaceSnapshot,
    chains: ChainsSnapshot | null,
    selection: SelectionSnapshot,
    projection: ProjectionSnapshot,
): PaneView {
    const surfaceIds = new Set(surface.node_ids);
    const chainNodes = new Set<string>();
    const chainEdges = new Set<string>();
    if (chains) {
        for (const chain of chains.chains) {
            chain.nodes.forEach((n) => chainNodes.add(n));
            chain.edges.forEach((e) => chainEdges.add(e));
        }
    }
    const selected = selectedIds(selection, "topology");
    const highlighted = new Set(selection.highlighted);
    const at = (id: string): [number, number] => positions.positions[id] ?? [0, 0];

    const vertices: VertexView[] = topology.nodes.map((node) => ({
        id: node.id,
        label: node.name,
        x: at(node.id)[0],
        y: at(node.id)[1],
        radius: NODE_RADIUS,
        colorClass: surfaceIds.has(node.id) ? "surface" : chainNodes.has(node.id) ? "chain" : "plain",
        selected: selected.has(node.id),
        highlighted: highlighted.has(node.id),
    }));

    const edges: EdgeView[] = topology.edges.map((edge) => ({
        id: edge.id,
        from: at(edge.source),
        to: at(edge.target),
        colorClass: chainEdges.has(edge.id) ? "chain" : "plain",
    }));

    // Projected attack vectors hover above the centroid of the components
    // they link to; one overlay edge per (vector, component) link.
    const byVector = new Map<string, string[]>();
    for (const [vectorId, nodeId] of projection.links) {
        byVector.set(vectorId, [...(byVector.get(vectorId) ?? []), nodeId]);
    }
    const overlay: EdgeView[] = [];
    for (const [vectorId, nodeIds] of [...byVector.entries()].sort()) {
        const cx = nodeIds.reduce((s, n) => s + at(n)[0], 0) / nodeIds.length;
        const cy = nodeIds.reduce((s, n) => s + at(n)[1], 0) / nodeIds.length;
        const anchor: [number, number] = [cx, cy - 0.25];
        for (const nodeId of nodeIds) {
            overlay.push({
                id: `${vectorId}->${nodeId}`,
                from: anchor,
                to: at(nodeId),
                colorClass: "chain",
            });
        }
    }
    return { vertices, edges, overlay };
}

const BAND_OF_LEVEL: Record<SpecNode_level, ColorClass> = {
    loss: "mission",
    hazard: "mission",
    constraint: "mission",
    control_action: "functional",
    component_ref: "structural",
};
type SpecNode_level = "loss" | "hazard" | "constraint" | "control_action" | "component_ref";

/** Specification pane: three bands, mission drawn at the top (the server's
 *  banded y grows downward through the bands, so rendering flips it). */
export function specView(
    spec: SpecSnapshot,
    positions: PositionsSnapshot,
    selection: SelectionSnapshot,
): PaneView {
    const selected = selectedIds(selection, "spec");
    const at = (id: string): [number, number] => {
        const [x, y] = positions.positions[id] ?? [0, 0];
        return [x, -y];
    };
    const vertices: VertexView[] = spec.nodes.map((node) => ({
        id: node.id,
        label: node.label,
        x: at(node.id)[0],
        y: at(node.id)[1],
        radius: NODE_RADIUS,
        colorClass: BAND_OF_LEVEL[node.level],
        selected: selected.has(node.id),
        highlighted: false,
    }));
    const edges: EdgeView[] = spec.edges.map(([parent, child]) => ({
        id: `${parent}->${child}`,
        from: at(parent),
        to: at(child),
        colorClass: "plain",
    }));
    return { vertices, edges, overlay: [] };
}

/** Attack-vector pane: red attack patterns, blue weakness classes sized by
 *  how many vulnerabilities they consumed, yellow expanded vulnerabilities.
 *  Only vertices passing the server-side filter are drawn. */
export function avView(
    av: AvSnapshot,
    positions: PositionsSnapshot,
    filter: AvFilterSnapshot,
    selection: SelectionSnapshot,
): PaneView {
    const visible = new Set(filter.ids);
    const selected = selectedIds(selection, "av");
    const at = (id: string): [number, number] => positions.positions[id] ?? [0, 0];
    const vertices: VertexView[] = av.vertices
        .filter((v) => visible.has(v.id))
        .map((vertex) => ({
            id: vertex.id,
            label: vertex.name,
            x: at(vertex.id)[0],
            y: at(vertex.id)[1],
            radius: vertexRadius(vertex.kind === "cwe" ? vertex.weight : 0),
            colorClass: vertex.kind,
            selected: selected.has(vertex.id),
            highlighted: false,
        }));
    const edges: EdgeView[] = av.edges
        .filter(([a, b]) => visible.has(a) && visible.has(b))
        .map(([a, b]) => ({
            id: `${a}--${b}`,
            from: at(a),
            to: at(b),
            colorClass: "plain",
        }));
    return { vertices, edges, overlay: [] };
}

/** Weakness-class vertices grow with consumption; strictly monotone and
 *  sub-linear so a thousand-CVE class stays drawable. */
export function vertexRadius(weight: number): number {
    return NODE_RADIUS + 3 * Math.sqrt(weight);
}

export interface BucketRowView extends BucketRow {
    colorClass: ColorClass;
}

/** Bucket table rows, color-coded like the attack-vector graph, in server
 *  order. */
export function bucketView(bucket: BucketSnapshot): BucketRowView[] {
    return bucket.rows.map((row) => ({ ...row, colorClass: row.kind }));
}
