// Stacked zoom regions for the time-series charts: drag pushes a region,
// middle-click pops back one level, right-click resets the whole stack.

export interface Region {
    xMin: number;
    xMax: number;
    yMin: number;
    yMax: number;
}

export class ZoomStack {
    private stack: Region[] = [];

    push(region: Region): void {
        this.stack.push(region);
    }

    /** Back one level; returns the region now in effect (null = full view). */
    back(): Region | null {
        this.stack.pop();
        return this.current();
    }

    reset(): void {
        this.stack = [];
    }

    current(): Region | null {
        return this.stack.length ? this.stack[this.stack.length - 1] : null;
    }

    depth(): number {
        return this.stack.length;
    }
}
