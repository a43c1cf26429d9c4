// Canvas charts: best-fitness and MSD lines over iterations, and the
// positive-increment histogram. Rendering always reads the latest data
// only; the zoom stack and log toggle are view state.

import { histogramView } from "./histview.js";
import type { HistogramPayload, Snapshot } from "./protocol.js";
import { ZoomStack, type Region } from "./zoom.js";

const MARGIN = 36;

interface Pt {
    x: number;
    y: number;
}

export class LineChart {
    readonly canvas: HTMLCanvasElement;
    readonly zoom = new ZoomStack();
    private points: Pt[] = [];
    private dragStart: { px: number; py: number } | null = null;

    constructor(private title: string, doc: Document = document, width = 460, height = 260) {
        this.canvas = doc.createElement("canvas");
        this.canvas.width = width;
        this.canvas.height = height;
        this.canvas.addEventListener("mousedown", (ev) => {
            const e = ev as MouseEvent;
            if (e.button === 0) this.dragStart = { px: e.offsetX, py: e.offsetY };
            if (e.button === 1) {
                e.preventDefault();
                this.zoom.back();
                this.draw();
            }
        });
        this.canvas.addEventListener("mouseup", (ev) => {
            const e = ev as MouseEvent;
            if (e.button === 0 && this.dragStart) {
                const region = this.regionFromDrag(this.dragStart, { px: e.offsetX, py: e.offsetY });
                if (region) {
                    this.zoom.push(region);
                    this.draw();
                }
                this.dragStart = null;
            }
        });
        this.canvas.addEventListener("contextmenu", (ev) => {
            ev.preventDefault();
            this.zoom.reset();
            this.draw();
        });
    }

    append(x: number, y: number): void {
        if (Number.isFinite(y)) this.points.push({ x, y });
    }

    clear(): void {
        this.points = [];
        this.zoom.reset();
        this.draw();
    }

    dataBounds(): Region | null {
        if (!this.points.length) return null;
        let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
        for (const p of this.points) {
            if (p.x < xMin) xMin = p.x;
            if (p.x > xMax) xMax = p.x;
            if (p.y < yMin) yMin = p.y;
            if (p.y > yMax) yMax = p.y;
        }
        if (yMin === yMax) {
            yMin -= 1;
            yMax += 1;
        }
        return { xMin, xMax: Math.max(xMax, xMin + 1), yMin, yMax };
    }

    private viewRegion(): Region | null {
        return this.zoom.current() ?? this.dataBounds();
    }

    private regionFromDrag(a: { px: number; py: number }, b: { px: number; py: number }): Region | null {
        const view = this.viewRegion();
        if (!view) return null;
        if (Math.abs(a.px - b.px) < 5 || Math.abs(a.py - b.py) < 5) return null;
        const toX = (px: number) =>
            view.xMin + ((px - MARGIN) / (this.canvas.width - 2 * MARGIN)) * (view.xMax - view.xMin);
        const toY = (py: number) =>
            view.yMax - ((py - MARGIN) / (this.canvas.height - 2 * MARGIN)) * (view.yMax - view.yMin);
        return {
            xMin: Math.min(toX(a.px), toX(b.px)),
            xMax: Math.max(toX(a.px), toX(b.px)),
            yMin: Math.min(toY(a.py), toY(b.py)),
            yMax: Math.max(toY(a.py), toY(b.py)),
        };
    }

    draw(): void {
        const ctx = this.canvas.getContext("2d");
        if (!ctx) return;
        const { width, height } = this.canvas;
        ctx.clearRect(0, 0, width, height);
        ctx.strokeStyle = "#888";
        ctx.strokeRect(MARGIN, MARGIN, width - 2 * MARGIN, height - 2 * MARGIN);
        ctx.fillStyle = "#222";
        ctx.font = "12px sans-serif";
        ctx.fillText(this.title, MARGIN, 16);
        const view = this.viewRegion();
        if (!view) return;
        const sx = (x: number) => MARGIN + ((x - view.xMin) / (view.xMax - view.xMin)) * (width - 2 * MARGIN);
        const sy = (y: number) => height - MARGIN - ((y - view.yMin) / (view.yMax - view.yMin)) * (height - 2 * MARGIN);
        ctx.beginPath();
        ctx.strokeStyle = "#1f6feb";
        let started = false;
        for (const p of this.points) {
            if (p.x < view.xMin || p.x > view.xMax) continue;
            const px = sx(p.x);
            const py = sy(Math.min(Math.max(p.y, view.yMin), view.yMax));
            if (!started) {
                ctx.moveTo(px, py);
                started = true;
            } else {
                ctx.lineTo(px, py);
            }
        }
        ctx.stroke();
        ctx.fillText(`iterations ${Math.round(view.xMin)}..${Math.round(view.xMax)}`, MARGIN, height - 8);
    }
}

export class HistogramChart {
    readonly canvas: HTMLCanvasElement;
    logScale = false;
    private payload: HistogramPayload | null = null;

    constructor(doc: Document = document, width = 460, height = 260) {
        this.canvas = doc.createElement("canvas");
        this.canvas.width = width;
        this.canvas.height = height;
    }

    update(payload: HistogramPayload | null): void {
        this.payload = payload;
        this.draw();
    }

    toggleLog(): void {
        this.logScale = !this.logScale;
        this.draw();
    }

    draw(): void {
        const ctx = this.canvas.getContext("2d");
        if (!ctx) return;
        const { width, height } = this.canvas;
        ctx.clearRect(0, 0, width, height);
        ctx.strokeStyle = "#888";
        ctx.strokeRect(MARGIN, MARGIN, width - 2 * MARGIN, height - 2 * MARGIN);
        ctx.fillStyle = "#222";
        ctx.font = "12px sans-serif";
        ctx.fillText(
            `positive MSD increments${this.logScale ? " (log-log)" : ""}`,
            MARGIN,
            16,
        );
        if (!this.payload) return;
        const pts = histogramView(this.payload, this.logScale);
        if (!pts.length) return;
        let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
        for (const p of pts) {
            if (p.px < xMin) xMin = p.px;
            if (p.px > xMax) xMax = p.px;
            if (p.py < yMin) yMin = p.py;
            if (p.py > yMax) yMax = p.py;
        }
        if (xMin === xMax) xMax = xMin + 1;
        if (yMin === yMax) yMax = yMin + 1;
        ctx.fillStyle = "#d73a49";
        for (const p of pts) {
            const px = MARGIN + ((p.px - xMin) / (xMax - xMin)) * (width - 2 * MARGIN);
            const py = height - MARGIN - ((p.py - yMin) / (yMax - yMin)) * (height - 2 * MARGIN);
            ctx.beginPath();
            ctx.arc(px, py, 2.5, 0, 2 * Math.PI);
            ctx.fill();
        }
    }
}

/** Feed both line charts from a snapshot (latest-value semantics). */
export function applySnapshot(fitness: LineChart, msd: LineChart, snap: Snapshot): void {
    fitness.append(snap.iteration, snap.best_fitness);
    if (snap.msd !== null) msd.append(snap.iteration, snap.msd);
    fitness.draw();
    msd.draw();
}
