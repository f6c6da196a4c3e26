// Time scrubber over a recorded turn: fetches the replay document over HTTP
// and lets the operator step through its frames frame-accurately, decoupled
// from the live stream.

import type { ApiClient } from "../api.js";
import type { ReplayDoc } from "../types.js";

export interface ScrubberHandlers {
  onFrame: (state: number[], t: number, reward: number) => void;
}

export class Scrubber {
  private doc: ReplayDoc | null = null;
  readonly element: HTMLElement;
  private readonly range: HTMLInputElement;
  private readonly label: HTMLElement;
  private readonly picker: HTMLSelectElement;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: () => string,
    private readonly handlers: ScrubberHandlers,
  ) {
    this.element = document.createElement("div");
    this.element.className = "scrubber";

    this.picker = document.createElement("select");
    this.picker.className = "turn-picker";
    this.picker.onchange = () => void this.loadTurn(Number(this.picker.value));

    this.range = document.createElement("input");
    this.range.type = "range";
    this.range.min = "0";
    this.range.value = "0";
    this.range.disabled = true;
    this.range.oninput = () => this.showFrame(Number(this.range.value));

    this.label = document.createElement("span");
    this.label.className = "scrub-label";
    this.label.textContent = "no recording loaded";

    this.element.append(this.picker, this.range, this.label);
  }

  setTurnCount(count: number): void {
    const current = this.picker.value;
    this.picker.textContent = "";
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = "live";
    this.picker.appendChild(blank);
    for (let i = 0; i < count; i++) {
      const option = document.createElement("option");
      option.value = String(i);
      option.textContent = `turn ${i}`;
      this.picker.appendChild(option);
    }
    this.picker.value = current && Number(current) < count ? current : "";
  }

  async loadTurn(turnIndex: number): Promise<void> {
    if (Number.isNaN(turnIndex)) {
      this.doc = null;
      this.range.disabled = true;
      this.label.textContent = "live";
      return;
    }
    const { value } = await this.api.getReplay(this.sessionId(), turnIndex);
    this.doc = value;
    this.range.max = String(value.frames.length - 1);
    this.range.value = "0";
    this.range.disabled = false;
    this.showFrame(0);
  }

  private showFrame(index: number): void {
    if (!this.doc) return;
    const frame = this.doc.frames[index];
    if (!frame) return;
    this.label.textContent = `t=${frame.t.toFixed(2)}s · r=${frame.reward.toFixed(3)}`;
    this.handlers.onFrame(frame.state, frame.t, frame.reward);
  }
}
