// Pure view computation for the positive-increment histogram.
//
// The view is always recomputed from the snapshot's histogram payload;
// the log-scale flag only changes the axis mapping of the produced
// points, so toggling it is lossless by construction (toggle twice and
// the points are identical).

import type { HistogramPayload } from "./protocol.js";

export interface HistPoint {
    /** bin center in data units */
    x: number;
    /** normalized frequency in [0, 1] */
    y: number;
    /** plotted coordinates after the axis mapping */
    px: number;
    py: number;
}

export function normalizedCounts(counts: number[]): number[] {
    let lo = Infinity;
    let hi = -Infinity;
    for (const c of counts) {
        if (c < lo) lo = c;
        if (c > hi) hi = c;
    }
    if (!counts.length || hi === lo) return counts.map(() => 0);
    return counts.map((c) => (c - lo) / (hi - lo));
}

export function histogramView(payload: HistogramPayload, logScale: boolean): HistPoint[] {
    const freqs = normalizedCounts(payload.counts);
    const points: HistPoint[] = [];
    for (let i = 0; i < payload.counts.length; i++) {
        if (payload.counts[i] === 0) continue; // empty bins carry no point
        const x = payload.range_min + payload.bin_size * (i + 0.5);
        const y = freqs[i];
        if (logScale && (x <= 0 || y <= 0)) continue; // unrepresentable on log axes
        points.push({
            x,
            y,
            px: logScale ? Math.log10(x) : x,
            py: logScale ? Math.log10(Math.max(y, Number.MIN_VALUE)) : y,
        });
    }
    return points;
}
