/** Canvas painting of pane view models, with zoom/pan viewports.
 *
 *  The painter draws through a minimal 2D-context interface so tests can
 *  substitute a recording stub; rendering the same view model twice emits
 *  the same operations.
 */

import { COLOR_OF, PaneView, VertexView } from "./viewmodel.js";

export interface Context2dLike {
    clearRect(x: number, y: number, w: number, h: number): void;
    beginPath(): void;
    moveTo(x: number, y: number): void;
    lineTo(x: number, y: number): void;
    arc(x: number, y: number, r: number, a0: number, a1: number): void;
    stroke(): void;
    fill(): void;
    fillText(text: string, x: number, y: number): void;
    setLineDash(segments: number[]): void;
    strokeStyle: string | CanvasGradient | CanvasPattern;
    fillStyle: string | CanvasGradient | CanvasPattern;
    lineWidth: number;
    font: string;
    globalAlpha: number;
}

export interface Viewport {
    zoom: number;
    panX: number;
    panY: number;
}

export interface Size {
    width: number;
    height: number;
}

/** Fit the view's bounding box into the canvas with a small margin. */
export function fitViewport(view: PaneView, size: Size): Viewport {
    const xs = view.vertices.map((v) => v.x);
    const ys = view.vertices.map((v) => v.y);
    if (!xs.length) {
        return { zoom: 1, panX: size.width / 2, panY: size.height / 2 };
    }
    const minX = Math.min(...xs), maxX = Math.max(...xs);
    const minY = Math.min(...ys), maxY = Math.max(...ys);
    const spanX = Math.max(maxX - minX, 1e-6);
    const spanY = Math.max(maxY - minY, 1e-6);
    const zoom = 0.85 * Math.min(size.width / spanX, size.height / spanY);
    return {
        zoom,
        panX: size.width / 2 - zoom * (minX + maxX) / 2,
        panY: size.height / 2 - zoom * (minY + maxY) / 2,
    };
}

export function toScreen(viewport: Viewport, x: number, y: number): [number, number] {
    return [viewport.panX + viewport.zoom * x, viewport.panY + viewport.zoom * y];
}

export function zoomAround(viewport: Viewport, factor: number, cx: number, cy: number): Viewport {
    const zoom = viewport.zoom * factor;
    return {
        zoom,
        panX: cx - (cx - viewport.panX) * factor,
        panY: cy - (cy - viewport.panY) * factor,
    };
}

export function panBy(viewport: Viewport, dx: number, dy: number): Viewport {
    return { ...viewport, panX: viewport.panX + dx, panY: viewport.panY + dy };
}

/** The vertex under a screen point, topmost first; null for empty canvas. */
export function hitTest(
    view: PaneView, viewport: Viewport, x: number, y: number,
): VertexView | null {
    for (let i = view.vertices.length - 1; i >= 0; i--) {
        const vertex = view.vertices[i];
        const [sx, sy] = toScreen(viewport, vertex.x, vertex.y);
        const r = vertex.radius + 2;
        if ((sx - x) * (sx - x) + (sy - y) * (sy - y) <= r * r) {
            return vertex;
        }
    }
    return null;
}

export function drawPane(
    ctx: Context2dLike, view: PaneView, viewport: Viewport, size: Size,
    labels = true,
): void {
    ctx.clearRect(0, 0, size.width, size.height);

    ctx.lineWidth = 1;
    ctx.globalAlpha = 1;
    ctx.setLineDash([]);
    for (const edge of view.edges) {
        const [x0, y0] = toScreen(viewport, edge.from[0], edge.from[1]);
        const [x1, y1] = toScreen(viewport, edge.to[0], edge.to[1]);
        ctx.strokeStyle = COLOR_OF[edge.colorClass];
        ctx.lineWidth = edge.colorClass === "chain" ? 2.5 : 1;
        ctx.beginPath();
        ctx.moveTo(x0, y0);
        ctx.lineTo(x1, y1);
        ctx.stroke();
    }

    // projection overlay: dashed, over the base edges
    ctx.setLineDash([5, 4]);
    for (const edge of view.overlay) {
        const [x0, y0] = toScreen(viewport, edge.from[0], edge.from[1]);
        const [x1, y1] = toScreen(viewport, edge.to[0], edge.to[1]);
        ctx.strokeStyle = COLOR_OF[edge.colorClass];
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        ctx.moveTo(x0, y0);
        ctx.lineTo(x1, y1);
        ctx.stroke();
    }
    ctx.setLineDash([]);

    for (const vertex of view.vertices) {
        const [x, y] = toScreen(viewport, vertex.x, vertex.y);
        ctx.fillStyle = COLOR_OF[vertex.colorClass];
        ctx.beginPath();
        ctx.arc(x, y, vertex.radius, 0, 2 * Math.PI);
        ctx.fill();
        if (vertex.selected || vertex.highlighted) {
            ctx.strokeStyle = vertex.selected ? "#111111" : COLOR_OF.chain;
            ctx.lineWidth = 3;
            ctx.beginPath();
            ctx.arc(x, y, vertex.radius + 3, 0, 2 * Math.PI);
            ctx.stroke();
        }
    }

    if (labels) {
        ctx.font = "11px sans-serif";
        ctx.fillStyle = "#202124";
        for (const vertex of view.vertices) {
            const [x, y] = toScreen(viewport, vertex.x, vertex.y);
            ctx.fillText(vertex.label, x + vertex.radius + 3, y + 3);
        }
    }
}
