// Parameter panel: a slider plus a textbox per parameter, bounded to the
// interactive ranges. Edits send set_param immediately for the standard
// and transform variants; for the adaptive variant the controls render
// read-only while the displayed values keep animating with the live
// snapshots. "Last Parameters" restores the values from the previous
// run's start; "Reset Parameters" restores the recommended defaults.

import { DEFAULT_PARAMS, PARAM_BOUNDS, type ParamsPayload } from "./protocol.js";
import type { Session } from "./session.js";

type ParamName = "alpha1" | "alpha2" | "omega";
const PARAM_NAMES: ParamName[] = ["alpha1", "alpha2", "omega"];

export class ParamPanel {
    readonly root: HTMLDivElement;
    private sliders = new Map<ParamName, HTMLInputElement>();
    private boxes = new Map<ParamName, HTMLInputElement>();
    private toast: HTMLDivElement;
    private locked = false;
    private lastParams: ParamsPayload = { ...DEFAULT_PARAMS };
    private editing: ParamName | null = null;

    constructor(private session: Session, doc: Document = document) {
        this.root = doc.createElement("div");
        this.root.className = "param-panel";
        for (const name of PARAM_NAMES) {
            const row = doc.createElement("div");
            row.className = "param-row";
            const label = doc.createElement("label");
            label.textContent = name;
            const slider = doc.createElement("input");
            slider.type = "range";
            slider.min = String(PARAM_BOUNDS[name].min);
            slider.max = String(PARAM_BOUNDS[name].max);
            slider.step = "0.001";
            slider.dataset.param = name;
            const box = doc.createElement("input");
            box.type = "number";
            box.min = slider.min;
            box.max = slider.max;
            box.step = "0.001";
            box.dataset.param = name;
            slider.addEventListener("input", () => {
                box.value = slider.value;
                void this.submit(name, Number(slider.value));
            });
            box.addEventListener("focus", () => (this.editing = name));
            box.addEventListener("blur", () => (this.editing = null));
            box.addEventListener("keydown", (ev) => {
                if ((ev as KeyboardEvent).key === "Enter") {
                    slider.value = box.value;
                    void this.submit(name, Number(box.value));
                }
            });
            row.append(label, slider, box);
            this.root.append(row);
            this.sliders.set(name, slider);
            this.boxes.set(name, box);
        }
        const buttons = doc.createElement("div");
        buttons.className = "param-buttons";
        const last = doc.createElement("button");
        last.textContent = "Last Parameters";
        last.addEventListener("click", () => void this.applyAll(this.lastParams));
        const reset = doc.createElement("button");
        reset.textContent = "Reset Parameters";
        reset.addEventListener("click", () => void this.applyAll(DEFAULT_PARAMS));
        buttons.append(last, reset);
        this.root.append(buttons);

        this.toast = doc.createElement("div");
        this.toast.className = "toast";
        this.toast.style.display = "none";
        this.root.append(this.toast);

        session.snapshots.subscribe((snap) => {
            for (const name of PARAM_NAMES) {
                const value = snap.params[name];
                const slider = this.sliders.get(name)!;
                slider.value = String(value);
                if (this.editing !== name) {
                    this.boxes.get(name)!.value = value.toFixed(3);
                }
            }
        });
    }

    /** Remember the parameters a run was started with, for "Last Parameters". */
    markRunStart(params: ParamsPayload): void {
        this.lastParams = { ...params };
    }

    /** Adaptive runs lock the controls; values still animate. */
    setLocked(locked: boolean): void {
        this.locked = locked;
        for (const name of PARAM_NAMES) {
            this.sliders.get(name)!.disabled = locked;
            this.boxes.get(name)!.disabled = locked;
        }
    }

    isLocked(): boolean {
        return this.locked;
    }

    private async submit(name: ParamName, value: number): Promise<void> {
        const reply = await this.session.send({ type: "set_param", name, value });
        if (reply.type === "error") {
            this.showToast(`set_param ${name} rejected: ${reply.message ?? "unknown error"}`);
        }
    }

    private async applyAll(params: ParamsPayload): Promise<void> {
        for (const name of PARAM_NAMES) {
            await this.submit(name, params[name]);
        }
    }

    showToast(message: string): void {
        this.toast.textContent = message;
        this.toast.style.display = "block";
        setTimeout(() => (this.toast.style.display = "none"), 4000);
    }

    toastText(): string | null {
        return this.toast.style.display === "none" ? null : this.toast.textContent;
    }
}
