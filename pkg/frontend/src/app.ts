/** Dashboard wiring: fetch snapshots, render the three panes and the bucket,
 *  push commands, and refetch whatever the server invalidates. */

import { ApiError, SessionApi } from "./api.js";
import {
    Context2dLike,
    Viewport,
    drawPane,
    fitViewport,
    hitTest,
    panBy,
    zoomAround,
} from "./canvas.js";
import {
    AvFilterSnapshot,
    AvSnapshot,
    BucketSnapshot,
    ChainsSnapshot,
    Pane,
    PositionsSnapshot,
    ProjectionSnapshot,
    SelectionSnapshot,
    SpecSnapshot,
    SurfaceSnapshot,
    TopologySnapshot,
} from "./model.js";
import { COLOR_OF, PaneView, avView, bucketView, specView, topologyView } from "./viewmodel.js";

interface Snapshots {
    topology: TopologySnapshot;
    spec: SpecSnapshot;
    av: AvSnapshot;
    surface: SurfaceSnapshot;
    chains: ChainsSnapshot | null;
    bucket: BucketSnapshot;
    selection: SelectionSnapshot;
    avFilter: AvFilterSnapshot;
    projection: ProjectionSnapshot;
    positions: Record<Pane, PositionsSnapshot>;
}

const API_BASE = (window as any).THREATLENS_API ?? "http://127.0.0.1:8330";

class Dashboard {
    private views: Record<Pane, PaneView> = {
        topology: { vertices: [], edges: [], overlay: [] },
        spec: { vertices: [], edges: [], overlay: [] },
        av: { vertices: [], edges: [], overlay: [] },
    };
    private viewports: Partial<Record<Pane, Viewport>> = {};
    private checkedBucketRows = new Set<string>();

    constructor(private api: SessionApi, private snapshots: Snapshots) {}

    static async boot(): Promise<Dashboard> {
        const api = await SessionApi.discover(API_BASE);
        const [topology, spec, av, surface, bucket, selection, avFilter, projection] =
            await Promise.all([
                api.topology(), api.spec(), api.avGraph(), api.surface(),
                api.bucket(), api.selection(), api.avFilter(), api.projection(),
            ]);
        const positions = {
            topology: await api.positions("topology"),
            spec: await api.positions("spec"),
            av: await api.positions("av"),
        };
        const dashboard = new Dashboard(api, {
            topology, spec, av, surface, chains: null, bucket, selection,
            avFilter, projection, positions,
        });
        dashboard.bindEvents();
        dashboard.renderAll();
        api.events((event) => dashboard.onInvalidated(event.invalidated));
        return dashboard;
    }

    // --- rendering -----------------------------------------------------------

    private canvas(pane: Pane): HTMLCanvasElement {
        return document.getElementById(`${pane}-canvas`) as HTMLCanvasElement;
    }

    private renderPane(pane: Pane): void {
        const s = this.snapshots;
        if (pane === "topology") {
            this.views.topology = topologyView(
                s.topology, s.positions.topology, s.surface, s.chains,
                s.selection, s.projection,
            );
        } else if (pane === "spec") {
            this.views.spec = specView(s.spec, s.positions.spec, s.selection);
        } else {
            this.views.av = avView(s.av, s.positions.av, s.avFilter, s.selection);
            const hint = document.getElementById("av-filter-error")!;
            if (s.avFilter.bucket_only && !s.avFilter.ids.length) {
                hint.textContent = "bucket is empty: no attack vectors to show";
            } else if (!hint.textContent?.startsWith("SyntaxError")) {
                hint.textContent = "";
            }
        }
        const canvas = this.canvas(pane);
        const size = { width: canvas.width, height: canvas.height };
        if (!this.viewports[pane]) {
            this.viewports[pane] = fitViewport(this.views[pane], size);
        }
        const ctx = canvas.getContext("2d") as unknown as Context2dLike;
        drawPane(ctx, this.views[pane], this.viewports[pane]!, size, pane !== "av");
    }

    private renderBucket(): void {
        const body = document.getElementById("bucket-body")!;
        body.innerHTML = "";
        for (const row of bucketView(this.snapshots.bucket)) {
            const tr = document.createElement("tr");
            tr.style.borderLeft = `6px solid ${COLOR_OF[row.colorClass]}`;
            const check = document.createElement("input");
            check.type = "checkbox";
            check.checked = this.checkedBucketRows.has(row.id);
            check.onchange = () => {
                if (check.checked) this.checkedBucketRows.add(row.id);
                else this.checkedBucketRows.delete(row.id);
                this.updateProjectButton();
            };
            const cells = [
                row.id, row.name, row.description, row.violated_components.join(", "),
            ];
            const checkCell = document.createElement("td");
            checkCell.appendChild(check);
            tr.appendChild(checkCell);
            for (const text of cells) {
                const td = document.createElement("td");
                td.textContent = text;
                tr.appendChild(td);
            }
            const remove = document.createElement("td");
            const removeButton = document.createElement("button");
            removeButton.textContent = "remove";
            removeButton.onclick = () => this.run({ command: "bucket_remove", id: row.id });
            remove.appendChild(removeButton);
            tr.appendChild(remove);
            body.appendChild(tr);
        }
        this.updateProjectButton();
    }

    private updateProjectButton(): void {
        const button = document.getElementById("project-button") as HTMLButtonElement;
        button.disabled = this.checkedBucketRows.size === 0;
    }

    private renderAll(): void {
        this.renderPane("topology");
        this.renderPane("spec");
        this.renderPane("av");
        this.renderBucket();
    }

    // --- server communication --------------------------------------------------

    private async run(command: Parameters<SessionApi["command"]>[0]): Promise<void> {
        try {
            await this.api.command(command);
        } catch (error) {
            this.toast(error instanceof ApiError ? error.message : String(error));
        }
    }

    private refetching = false;
    private pendingInvalidations = new Set<string>();

    private onInvalidated(resources: string[]): void {
        resources.forEach((r) => this.pendingInvalidations.add(r));
        if (!this.refetching) {
            void this.refetch();
        }
    }

    private async refetch(): Promise<void> {
        this.refetching = true;
        try {
            while (this.pendingInvalidations.size) {
                const batch = new Set(this.pendingInvalidations);
                this.pendingInvalidations.clear();
                const s = this.snapshots;
                const jobs: Promise<void>[] = [];
                const pull = <T,>(get: () => Promise<T>, set: (v: T) => void) =>
                    jobs.push(get().then(set));
                if (batch.has("topology")) pull(() => this.api.topology(), (v) => (s.topology = v));
                if (batch.has("spec")) pull(() => this.api.spec(), (v) => (s.spec = v));
                if (batch.has("av-graph")) pull(() => this.api.avGraph(), (v) => (s.av = v));
                if (batch.has("surface")) pull(() => this.api.surface(), (v) => (s.surface = v));
                if (batch.has("bucket")) pull(() => this.api.bucket(), (v) => (s.bucket = v));
                if (batch.has("selection")) pull(() => this.api.selection(), (v) => (s.selection = v));
                if (batch.has("av-filter")) pull(() => this.api.avFilter(), (v) => (s.avFilter = v));
                if (batch.has("projection")) pull(() => this.api.projection(), (v) => (s.projection = v));
                if (batch.has("positions")) {
                    pull(() => this.api.positions("topology"), (v) => (s.positions.topology = v));
                    pull(() => this.api.positions("spec"), (v) => (s.positions.spec = v));
                    pull(() => this.api.positions("av"), (v) => (s.positions.av = v));
                }
                if (batch.has("chains") && s.chains) {
                    pull(() => this.api.chains(s.chains!.target), (v) => (s.chains = v));
                }
                await Promise.all(jobs);
                this.renderAll();
            }
        } finally {
            this.refetching = false;
        }
    }

    // --- interactions ------------------------------------------------------------

    private bindEvents(): void {
        for (const pane of ["topology", "spec", "av"] as Pane[]) {
            const canvas = this.canvas(pane);
            canvas.addEventListener("click", (event) => this.onClick(pane, event));
            canvas.addEventListener("dblclick", (event) => this.onDoubleClick(pane, event));
            canvas.addEventListener("wheel", (event) => {
                event.preventDefault();
                const factor = event.deltaY < 0 ? 1.15 : 1 / 1.15;
                const rect = canvas.getBoundingClientRect();
                this.viewports[pane] = zoomAround(
                    this.viewports[pane]!, factor,
                    event.clientX - rect.left, event.clientY - rect.top,
                );
                this.renderPane(pane);
            });
            let dragging: [number, number] | null = null;
            canvas.addEventListener("mousedown", (e) => (dragging = [e.clientX, e.clientY]));
            canvas.addEventListener("mousemove", (e) => {
                if (!dragging) return;
                this.viewports[pane] = panBy(
                    this.viewports[pane]!, e.clientX - dragging[0], e.clientY - dragging[1],
                );
                dragging = [e.clientX, e.clientY];
                this.renderPane(pane);
            });
            window.addEventListener("mouseup", () => (dragging = null));
        }

        const filterInput = document.getElementById("av-filter-input") as HTMLInputElement;
        const filterError = document.getElementById("av-filter-error")!;
        const bucketOnly = document.getElementById("bucket-only") as HTMLInputElement;
        let debounce: number | undefined;
        const applyFilter = () => {
            // invalid patterns are shown inline and never sent
            try {
                new RegExp(filterInput.value);
            } catch (error) {
                filterError.textContent = String(error);
                return;
            }
            filterError.textContent = "";
            const fields = Array.from(
                document.querySelectorAll<HTMLInputElement>(".field-toggle"),
            )
                .filter((box) => box.checked)
                .map((box) => box.value);
            void this.run({
                command: "filter",
                pattern: filterInput.value,
                fields: fields.length ? fields : ["id", "name", "description", "components"],
                bucket_only: bucketOnly.checked,
            });
        };
        const schedule = () => {
            window.clearTimeout(debounce);
            debounce = window.setTimeout(applyFilter, 250);
        };
        filterInput.addEventListener("input", schedule);
        bucketOnly.addEventListener("change", applyFilter);
        document.querySelectorAll<HTMLInputElement>(".field-toggle").forEach((box) => {
            box.addEventListener("change", applyFilter);
        });

        (document.getElementById("project-button") as HTMLButtonElement).onclick = () =>
            this.run({ command: "project", ids: [...this.checkedBucketRows].sort() });
        (document.getElementById("clear-projection") as HTMLButtonElement).onclick = () =>
            this.run({ command: "project", ids: [] });

        const targetInput = document.getElementById("chain-target") as HTMLInputElement;
        (document.getElementById("chain-button") as HTMLButtonElement).onclick = async () => {
            try {
                this.snapshots.chains = await this.api.chains(targetInput.value);
                this.renderPane("topology");
            } catch (error) {
                this.toast(error instanceof ApiError ? error.message : String(error));
            }
        };
    }

    private onClick(pane: Pane, event: MouseEvent): void {
        const canvas = this.canvas(pane);
        const rect = canvas.getBoundingClientRect();
        const hit = hitTest(
            this.views[pane], this.viewports[pane]!,
            event.clientX - rect.left, event.clientY - rect.top,
        );
        if (hit) {
            void this.run({ command: "select", pane, id: hit.id });
        } else {
            void this.run({ command: "clear_selection" });
        }
    }

    private async onDoubleClick(pane: Pane, event: MouseEvent): Promise<void> {
        const canvas = this.canvas(pane);
        const rect = canvas.getBoundingClientRect();
        const hit = hitTest(
            this.views[pane], this.viewports[pane]!,
            event.clientX - rect.left, event.clientY - rect.top,
        );
        if (!hit) return;
        if (pane === "av") {
            const vertex = this.snapshots.av.vertices.find((v) => v.id === hit.id);
            if (vertex?.kind === "cwe" && !vertex.expanded && vertex.weight > 0) {
                await this.run({ command: "expand", id: hit.id });
                return;
            }
            try {
                const detail = await this.api.entry(hit.id);
                const popup = document.getElementById("detail-popup")!;
                popup.querySelector("h3")!.textContent = `${detail.id}: ${detail.name}`;
                popup.querySelector("pre")!.textContent = [
                    detail.description,
                    detail.severity !== null ? `severity: ${detail.severity}` : "",
                    detail.extra_text.join("\n"),
                ].filter(Boolean).join("\n\n");
                popup.style.display = "block";
            } catch (error) {
                this.toast(error instanceof ApiError ? error.message : String(error));
            }
        }
    }

    private toast(message: string): void {
        const element = document.getElementById("toast")!;
        element.textContent = message;
        element.style.opacity = "1";
        window.setTimeout(() => (element.style.opacity = "0"), 4000);
    }
}

if (typeof document !== "undefined" && document.getElementById("topology-canvas")) {
    Dashboard.boot().catch((error) => {
        document.getElementById("toast")!.textContent = String(error);
    });
}

export { Dashboard };
