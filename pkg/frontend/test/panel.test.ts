// @vitest-environment jsdom
import { describe, expect, it } from "vitest";
import { ParamPanel } from "../src/paramPanel.js";
import type { Command, Reply, Snapshot } from "../src/protocol.js";
import { Session } from "../src/session.js";
import type { Transport } from "../src/transport.js";

/** In-memory transport wired to a scripted service. */
class FakeTransport implements Transport {
    sent: Command[] = [];
    private messageHandler: (raw: string) => void = () => {};
    replyWith: (cmd: Command) => Reply = (cmd) => ({ type: "ok", cmd: cmd.type, state: "running" });

    send(line: string): void {
        const cmd = JSON.parse(line) as Command;
        this.sent.push(cmd);
        this.messageHandler(JSON.stringify(this.replyWith(cmd)));
    }
    close(): void {}
    onMessage(handler: (raw: string) => void): void {
        this.messageHandler = handler;
    }
    onClose(): void {}
    onOpen(handler: () => void): void {
        handler();
    }
    pushSnapshot(snap: Partial<Snapshot>): void {
        this.messageHandler(
            JSON.stringify({
                type: "snapshot",
                iteration: 1,
                best_fitness: -1,
                msd: 1,
                params: { alpha1: 1, alpha2: 1, omega: 0.8 },
                running: true,
                state: "running",
                histogram: null,
                ...snap,
            }),
        );
    }
}

function setup() {
    const transport = new FakeTransport();
    const session = new Session(transport);
    const panel = new ParamPanel(session, document);
    document.body.append(panel.root);
    return { transport, session, panel };
}

const flush = () => new Promise((resolve) => setTimeout(resolve, 0));

describe("parameter panel", () => {
    it("adaptive lock renders controls read-only while values animate", async () => {
        const { transport, panel } = setup();
        panel.setLocked(true);
        const sliders = panel.root.querySelectorAll<HTMLInputElement>("input[type=range]");
        const boxes = panel.root.querySelectorAll<HTMLInputElement>("input[type=number]");
        expect(sliders.length).toBe(3);
        for (const el of [...sliders, ...boxes]) expect(el.disabled).toBe(true);

        transport.pushSnapshot({ params: { alpha1: 1.1, alpha2: 0.9, omega: 0.83 } });
        await flush();
        transport.pushSnapshot({ params: { alpha1: 1.2, alpha2: 0.8, omega: 0.86 } });
        await flush();
        const omegaBox = panel.root.querySelector<HTMLInputElement>(
            'input[type=number][data-param="omega"]',
        )!;
        expect(omegaBox.value).toBe("0.860"); // still animating despite the lock
        expect(omegaBox.disabled).toBe(true);
    });

    it("slider edits send set_param immediately when unlocked", async () => {
        const { transport, panel } = setup();
        const omegaSlider = panel.root.querySelector<HTMLInputElement>(
            'input[type=range][data-param="omega"]',
        )!;
        omegaSlider.value = "0.9";
        omegaSlider.dispatchEvent(new Event("input"));
        await flush();
        expect(transport.sent).toContainEqual({ type: "set_param", name: "omega", value: 0.9 });
    });

    it("rejected set_param surfaces as a toast", async () => {
        const { transport, panel } = setup();
        transport.replyWith = (cmd) => ({
            type: "error",
            cmd: cmd.type,
            state: "running",
            message: "parameters are locked while the adaptive variant runs",
        });
        const slider = panel.root.querySelector<HTMLInputElement>(
            'input[type=range][data-param="alpha1"]',
        )!;
        slider.value = "2.0";
        slider.dispatchEvent(new Event("input"));
        await flush();
        expect(panel.toastText()).toContain("locked");
    });

    it("displayed params always equal the last snapshot", async () => {
        const { transport, panel } = setup();
        transport.pushSnapshot({ params: { alpha1: 2.5, alpha2: 0.25, omega: 1.75 } });
        await flush();
        for (const [name, value] of [
            ["alpha1", "2.500"],
            ["alpha2", "0.250"],
            ["omega", "1.750"],
        ] as const) {
            const box = panel.root.querySelector<HTMLInputElement>(
                `input[type=number][data-param="${name}"]`,
            )!;
            expect(box.value).toBe(value);
        }
    });

    it("reset button pushes the recommended defaults", async () => {
        const { transport, panel } = setup();
        const buttons = [...panel.root.querySelectorAll("button")];
        const reset = buttons.find((b) => b.textContent === "Reset Parameters")!;
        reset.click();
        await flush();
        const sent = transport.sent.filter((c) => c.type === "set_param");
        expect(sent).toEqual([
            { type: "set_param", name: "alpha1", value: 1.494 },
            { type: "set_param", name: "alpha2", value: 1.494 },
            { type: "set_param", name: "omega", value: 0.729 },
        ]);
    });
});
