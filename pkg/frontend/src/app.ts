// Dashboard wiring: connection banner, config form, lifecycle buttons,
// parameter panel, and the three live views.

import { applySnapshot, HistogramChart, LineChart } from "./charts.js";
import { ParamPanel } from "./paramPanel.js";
import type { AdaptivePayload, ParamsPayload, SwarmConfigPayload } from "./protocol.js";
import { reconnectDelays, Session } from "./session.js";
import { WebSocketTransport } from "./transport.js";

function field(doc: Document, label: string, value: string, type = "number"): [HTMLLabelElement, HTMLInputElement] {
    const wrap = doc.createElement("label");
    wrap.textContent = label + " ";
    const input = doc.createElement("input");
    input.type = type;
    input.value = value;
    wrap.append(input);
    return [wrap, input];
}

export function mountApp(root: HTMLElement, doc: Document = document): void {
    const banner = doc.createElement("div");
    banner.className = "banner";
    banner.textContent = "disconnected";
    root.append(banner);

    const [addrWrap, addrInput] = field(doc, "service", "ws://127.0.0.1:7879", "text");
    const connectBtn = doc.createElement("button");
    connectBtn.textContent = "Connect";
    root.append(addrWrap, connectBtn);

    let session: Session | null = null;
    let attempt = 0;

    const fitness = new LineChart("best fitness", doc);
    const msd = new LineChart("swarm MSD", doc);
    const hist = new HistogramChart(doc);

    const connect = () => {
        session?.close();
        const transport = new WebSocketTransport(addrInput.value);
        session = new Session(transport);
        session.connection.subscribe((state) => {
            banner.textContent = state === "open" ? "connected" : state;
            banner.dataset.state = state;
            if (state === "closed") {
                // sessions are not resumable: reconnect, then reconfigure by hand
                const delay = reconnectDelays(attempt++);
                setTimeout(connect, delay);
            } else if (state === "open") {
                attempt = 0;
            }
        });
        mountControls(session);
    };
    connectBtn.addEventListener("click", () => connect());

    const controlsHost = doc.createElement("div");
    root.append(controlsHost);

    function mountControls(s: Session): void {
        controlsHost.replaceChildren();
        const cfg = doc.createElement("form");
        const [nWrap, nInput] = field(doc, "particles", "20");
        const [dWrap, dInput] = field(doc, "dims", "20");
        const [iWrap, iInput] = field(doc, "iterations", "10000");
        const [bWrap, bInput] = field(doc, "boundary", "500");
        const [seedWrap, seedInput] = field(doc, "seed", "42");
        const objSel = doc.createElement("select");
        for (const o of ["sphere", "rastrigin", "griewank", "schwefel"]) {
            const opt = doc.createElement("option");
            opt.value = opt.textContent = o;
            objSel.append(opt);
        }
        const varSel = doc.createElement("select");
        for (const v of ["standard", "eigencritical", "adaptive"]) {
            const opt = doc.createElement("option");
            opt.value = opt.textContent = v;
            varSel.append(opt);
        }
        const [epsWrap, epsInput] = field(doc, "epsilon", "0.1");
        const [a1Wrap, a1Input] = field(doc, "alpha1", "1.494");
        const [a2Wrap, a2Input] = field(doc, "alpha2", "1.494");
        const [omWrap, omInput] = field(doc, "omega", "0.729");
        cfg.append(objSel, varSel, nWrap, dWrap, iWrap, bWrap, seedWrap, a1Wrap, a2Wrap, omWrap, epsWrap);
        controlsHost.append(cfg);

        const buttons = doc.createElement("div");
        const mk = (label: string, onClick: () => void) => {
            const b = doc.createElement("button");
            b.textContent = label;
            b.addEventListener("click", (ev) => {
                ev.preventDefault();
                onClick();
            });
            buttons.append(b);
            return b;
        };
        const panel = new ParamPanel(s, doc);

        mk("Configure", () => {
            const params: ParamsPayload = {
                alpha1: Number(a1Input.value),
                alpha2: Number(a2Input.value),
                omega: Number(omInput.value),
            };
            const config: SwarmConfigPayload = {
                n_particles: Number(nInput.value),
                dims: Number(dInput.value),
                iterations: Number(iInput.value),
                boundary_radius: Number(bInput.value),
                objective: objSel.value as SwarmConfigPayload["objective"],
                variant: varSel.value as SwarmConfigPayload["variant"],
                seed: Number(seedInput.value),
            };
            const adaptive: AdaptivePayload | undefined =
                config.variant === "adaptive" ? { epsilon: Number(epsInput.value) } : undefined;
            void s.send({ type: "configure", config, params, adaptive }).then((reply) => {
                if (reply.type === "error") {
                    panel.showToast(reply.message ?? "configure rejected");
                    return;
                }
                panel.markRunStart(params);
                panel.setLocked(config.variant === "adaptive");
                fitness.clear();
                msd.clear();
            });
        });
        mk("Start", () => void s.send({ type: "start" }));
        mk("Pause", () => void s.send({ type: "pause" }));
        mk("Resume", () => void s.send({ type: "resume" }));
        mk("Reset", () => {
            void s.send({ type: "reset" });
            fitness.clear();
            msd.clear();
        });
        const logBtn = mk("Log Scale", () => hist.toggleLog());
        logBtn.title = "toggle log-log axes on the histogram";
        const [binWrap, binInput] = field(doc, "bin size", "0.2");
        buttons.append(binWrap);
        binInput.addEventListener("change", () => {
            void s.send({
                type: "set_histogram",
                bin_size: Number(binInput.value),
                log_scale: hist.logScale,
            });
        });
        controlsHost.append(buttons, panel.root, fitness.canvas, msd.canvas, hist.canvas);

        s.snapshots.subscribe((snap) => {
            applySnapshot(fitness, msd, snap);
            hist.update(snap.histogram);
        });
    }
}
