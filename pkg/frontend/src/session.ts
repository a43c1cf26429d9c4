// Client session: commands out, ordered replies matched back, snapshots
// into a latest-value store. The UI never mutates swarm state except by
// sending commands here, and renders only from the latest snapshot, so a
// burst of snapshots costs one repaint, never an unbounded queue.

import type { Command, Reply, ServerMessage, Snapshot } from "./protocol.js";
import type { Transport } from "./transport.js";

export type ConnectionState = "connecting" | "open" | "closed";

interface Pending {
    resolve: (reply: Reply) => void;
}

export class LatestStore<T> {
    private value: T | null = null;
    private listeners = new Set<(value: T) => void>();

    set(value: T): void {
        this.value = value;
        for (const fn of this.listeners) fn(value);
    }

    get(): T | null {
        return this.value;
    }

    subscribe(fn: (value: T) => void): () => void {
        this.listeners.add(fn);
        if (this.value !== null) fn(this.value);
        return () => this.listeners.delete(fn);
    }
}

export class Session {
    readonly snapshots = new LatestStore<Snapshot>();
    readonly connection = new LatestStore<ConnectionState>();
    private pending: Pending[] = [];

    constructor(private transport: Transport) {
        this.connection.set("connecting");
        transport.onOpen(() => this.connection.set("open"));
        transport.onMessage((raw) => this.dispatch(raw));
        transport.onClose(() => {
            this.connection.set("closed");
            // sessions are not resumable: a reconnect needs a fresh configure,
            // so surviving command promises resolve as transport errors
            for (const p of this.pending.splice(0)) {
                p.resolve({ type: "error", cmd: null, state: "closed", message: "connection closed" });
            }
        });
    }

    private dispatch(raw: string): void {
        let msg: ServerMessage;
        try {
            msg = JSON.parse(raw) as ServerMessage;
        } catch {
            return;
        }
        if (msg.type === "snapshot") {
            this.snapshots.set(msg);
            return;
        }
        const waiter = this.pending.shift();
        waiter?.resolve(msg);
    }

    /** Send one command; resolves with the service's reply, in order. */
    send(cmd: Command): Promise<Reply> {
        return new Promise((resolve) => {
            this.pending.push({ resolve });
            this.transport.send(JSON.stringify(cmd));
        });
    }

    close(): void {
        this.transport.close();
    }
}

/** Reconnect helper with capped exponential backoff. */
export function reconnectDelays(attempt: number, baseMs = 250, capMs = 8000): number {
    return Math.min(capMs, baseMs * 2 ** Math.min(attempt, 10));
}
