// Protocol integration against the real Python service: a headless
// client configures and starts a swarm over TCP, then checks the
// slider-to-engine contract (set_param visible in the stream within two
// sample intervals) and the adaptive parameter lock.
import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import type { Reply, Snapshot } from "../src/protocol.js";
import { Session } from "../src/session.js";
import { TcpTransport } from "../src/transport.js";

const HOST = "127.0.0.1";
const PORT = 7890 + Math.floor(Math.random() * 100);
let service: ChildProcess;

function waitFor<T>(
    predicate: () => T | null | undefined | false,
    timeoutMs = 10_000,
    stepMs = 5,
): Promise<T> {
    return new Promise((resolve, reject) => {
        const started = Date.now();
        const tick = () => {
            const value = predicate();
            if (value) return resolve(value as T);
            if (Date.now() - started > timeoutMs) return reject(new Error("timed out"));
            setTimeout(tick, stepMs);
        };
        tick();
    });
}

function connect(): Promise<Session> {
    const session = new Session(new TcpTransport(HOST, PORT));
    return waitFor(() => (session.connection.get() === "open" ? session : null)).then(
        () => session,
    );
}

const baseConfig = (variant: "standard" | "adaptive") => ({
    type: "configure" as const,
    config: {
        n_particles: 8,
        dims: 6,
        iterations: 1_000_000_000,
        boundary_radius: 50.0,
        objective: "sphere" as const,
        variant,
        seed: 7,
    },
    params: { alpha1: 1.494, alpha2: 1.494, omega: 0.729 },
    ...(variant === "adaptive" ? { adaptive: { epsilon: 0.1 } } : {}),
});

beforeAll(async () => {
    service = spawn(
        "python3",
        ["-m", "psolab.cli", "serve", "--bind", `${HOST}:${PORT}`, "--sample-interval-ms", "2"],
        { cwd: "..", stdio: ["ignore", "pipe", "pipe"] },
    );
    await new Promise<void>((resolve, reject) => {
        service.stdout!.on("data", (chunk: Buffer) => {
            if (String(chunk).includes("listening")) resolve();
        });
        service.on("exit", (code) => reject(new Error(`service exited early (${code})`)));
        setTimeout(() => reject(new Error("service did not start")), 15_000);
    });
}, 20_000);

afterAll(() => {
    service?.kill();
});

describe("live service integration", () => {
    it("reflects set_param in the stream within two sample intervals", async () => {
        const session = await connect();
        expect((await session.send(baseConfig("standard"))).type).toBe("ok");
        expect((await session.send({ type: "start" })).type).toBe("ok");
        await waitFor(() => {
            const s = session.snapshots.get();
            return s && s.iteration > 5 ? s : null;
        });

        let snapshotsAfterSend = 0;
        let reflected: Snapshot | null = null;
        const unsubscribe = session.snapshots.subscribe((snap) => {
            if (reflected) return;
            snapshotsAfterSend += 1;
            if (snap.params.omega === 0.9) reflected = snap;
        });
        snapshotsAfterSend = 0; // ignore the replayed latest value
        const reply = await session.send({ type: "set_param", name: "omega", value: 0.9 });
        expect(reply.type).toBe("ok");
        await waitFor(() => reflected);
        unsubscribe();
        expect(snapshotsAfterSend).toBeLessThanOrEqual(2);
        session.close();
    }, 20_000);

    it("rejects set_param for the adaptive variant while values animate", async () => {
        const session = await connect();
        expect((await session.send(baseConfig("adaptive"))).type).toBe("ok");
        expect((await session.send({ type: "start" })).type).toBe("ok");
        await waitFor(() => {
            const s = session.snapshots.get();
            return s && s.iteration > 5 ? s : null;
        });

        const rejection: Reply = await session.send({
            type: "set_param",
            name: "omega",
            value: 0.9,
        });
        expect(rejection.type).toBe("error");
        expect(rejection.message).toMatch(/locked/);

        // the stream keeps showing the adapting values
        const first = session.snapshots.get()!;
        const later = await waitFor(() => {
            const s = session.snapshots.get();
            return s && s.iteration > first.iteration + 50 ? s : null;
        });
        expect(later.params.omega).not.toBe(0.9);
        session.close();
    }, 20_000);

    it("keeps streaming frozen snapshots while paused", async () => {
        const session = await connect();
        await session.send(baseConfig("standard"));
        await session.send({ type: "start" });
        await waitFor(() => {
            const s = session.snapshots.get();
            return s && s.iteration > 5 ? s : null;
        });
        expect((await session.send({ type: "pause" })).state).toBe("paused");
        const frozen = await waitFor(() => {
            const s = session.snapshots.get();
            return s && !s.running ? s : null;
        });
        let seen = 0;
        const unsubscribe = session.snapshots.subscribe((snap) => {
            if (snap.iteration === frozen.iteration && !snap.running) seen += 1;
        });
        await waitFor(() => (seen >= 3 ? true : null));
        unsubscribe();
        session.close();
    }, 20_000);
});
