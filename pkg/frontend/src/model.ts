/** Wire types for the session API. These mirror the server snapshots 1:1;
 *  the UI never derives analysis data of its own. */

export type Pane = "topology" | "spec" | "av";

export interface TopologyNode {
    id: string;
    name: string;
    attributes: Record<string, string>;
    entry_point: boolean;
}

export interface TopologyEdge {
    id: string;
    source: string;
    target: string;
    attributes: Record<string, string>;
}

export interface TopologySnapshot {
    nodes: TopologyNode[];
    edges: TopologyEdge[];
}

export interface SpecNode {
    id: string;
    label: string;
    level: "loss" | "hazard" | "constraint" | "control_action" | "component_ref";
    description: string;
    component_id: string | null;
}

export interface SpecSnapshot {
    nodes: SpecNode[];
    edges: [string, string][];
}

export interface AvVertex {
    id: string;
    kind: "capec" | "cwe" | "cve";
    name: string;
    weight: number;
    expanded: boolean;
}

export interface AvSnapshot {
    vertices: AvVertex[];
    edges: [string, string][];
}

export interface SurfaceSnapshot {
    node_ids: string[];
}

export interface Chain {
    nodes: string[];
    edges: string[];
}

export interface ChainsSnapshot {
    target: string;
    chains: Chain[];
    truncated: boolean;
}

export interface PositionsSnapshot {
    positions: Record<string, [number, number]>;
}

export interface BucketRow {
    id: string;
    kind: "capec" | "cwe" | "cve";
    name: string;
    description: string;
    violated_components: string[];
}

export interface BucketSnapshot {
    rows: BucketRow[];
}

export interface SelectionSnapshot {
    selection: [string, string][];
    av_component_filter: string[] | null;
    highlighted: string[];
}

export interface AvFilterSnapshot {
    ids: string[];
    pattern: string;
    fields: string[];
    bucket_only: boolean;
}

export interface ProjectionSnapshot {
    links: [string, string][];
}

export interface EntryDetail {
    id: string;
    source: "CAPEC" | "CWE" | "CVE";
    name: string;
    description: string;
    severity: number | null;
    relations: [string, string][];
    extra_text: string[];
}

export interface CommandResult {
    ok: boolean;
    invalidated: string[];
}

export interface InvalidationEvent {
    session_id: string;
    invalidated: string[];
}

export type Command =
    | { command: "select"; pane: Pane; id: string }
    | { command: "clear_selection" }
    | { command: "filter"; pattern: string; fields: string[]; bucket_only: boolean }
    | { command: "edit"; element_id: string; action: "add" | "remove"; key: string; value: string }
    | { command: "delete"; ids: string[] }
    | { command: "expand"; id: string }
    | { command: "bucket_add"; id: string }
    | { command: "bucket_remove"; id: string }
    | { command: "project"; ids: string[] };
