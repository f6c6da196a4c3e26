// Session view-model.  All state is derived from API payloads and stream
// events — the client never runs physics and never recomputes rewards; the
// only computation it repeats is the canonical-serialization checksum, to
// prove the term table it renders is exactly what the server is using.

import { ApiClient, ApiError } from "./api.js";
import { specChecksumFromBody } from "./canonical.js";
import { specDiff, type SpecDiff } from "./diff.js";
import type {
  ArtifactsPayload,
  DiagnosticsEvent,
  FrameEvent,
  SessionEvent,
  SessionSummary,
  SpecDoc,
  TurnPayload,
} from "./types.js";

export type Phase = "idle" | "translating" | "executing" | "reviewing";
export type SubmitMode = "auto" | "review";

export interface TurnView {
  index: number;
  instruction: string;
  descriptorText: string;
  scriptText: string;
  spec: SpecDoc;
  checksum: string;
  /** null while the hash is still being computed */
  checksumOk: boolean | null;
  diff: SpecDiff;
  seed: number;
  frames: number;
  dt: number;
  backend: string;
  finalState: number[];
}

export interface PendingView {
  instruction: string;
  descriptorText: string;
  scriptText: string;
  spec: SpecDoc;
  checksum: string;
  checksumOk: boolean | null;
  diff: SpecDiff;
}

export interface ErrorView {
  message: string;
  attempts?: number;
  lastCompletion?: string;
}

export interface GapMarker {
  from: number;
  to: number;
}

export interface StoreState {
  phase: Phase;
  mode: SubmitMode;
  summary: SessionSummary | null;
  turns: TurnView[];
  pending: PendingView | null;
  notice: string | null;
  error: ErrorView | null;
  liveFrames: FrameEvent[];
  diagnostics: DiagnosticsEvent[];
  gaps: GapMarker[];
  currentState: number[] | null;
  streamStatus: "connected" | "reconnecting" | "closed" | "detached";
}

export const BUSY_NOTICE = "A turn is already running — wait for it to finish.";

type Listener = (state: StoreState) => void;

export class SessionStore {
  readonly state: StoreState = {
    phase: "idle",
    mode: "auto",
    summary: null,
    turns: [],
    pending: null,
    notice: null,
    error: null,
    liveFrames: [],
    diagnostics: [],
    gaps: [],
    currentState: null,
    streamStatus: "detached",
  };

  private listeners: Listener[] = [];
  private readonly frameBuffer: number;

  constructor(
    readonly api: ApiClient,
    options: { frameBuffer?: number } = {},
  ) {
    this.frameBuffer = options.frameBuffer ?? 512;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  get sessionId(): string {
    const id = this.state.summary?.id;
    if (!id) throw new Error("no session attached");
    return id;
  }

  setMode(mode: SubmitMode): void {
    this.state.mode = mode;
    this.notify();
  }

  // ------------------------------------------------------------ loading

  async create(embodiment: string, scene?: string, seed = 0): Promise<void> {
    const { value } = await this.api.createSession(embodiment, scene, seed);
    this.state.summary = value;
    this.state.turns = [];
    this.state.currentState = null;
    this.notify();
  }

  /** Attach to an existing session and rebuild every turn's view, verifying
   * each term table against the server checksum from the raw bytes. */
  async attach(sessionId: string): Promise<void> {
    const { value, raw } = await this.api.getSession(sessionId);
    const { turn_history, state, ...summary } = value;
    this.state.summary = summary;
    this.state.currentState = state;
    this.state.turns = [];
    let prevSpec: SpecDoc | null = null;
    for (let i = 0; i < turn_history.length; i++) {
      const view = this.turnView(turn_history[i], prevSpec);
      this.state.turns.push(view);
      prevSpec = view.spec;
      void this.verifyTurn(view, raw, "turn_history", i, "spec");
    }
    this.notify();
  }

  private turnView(payload: TurnPayload, prevSpec: SpecDoc | null): TurnView {
    return {
      index: payload.index,
      instruction: payload.instruction,
      descriptorText: payload.descriptor_text,
      scriptText: payload.script_text,
      spec: payload.spec,
      checksum: payload.checksum,
      checksumOk: null,
      diff: specDiff(prevSpec, payload.spec),
      seed: payload.seed,
      frames: payload.frames,
      dt: payload.dt,
      backend: payload.backend,
      finalState: payload.final_state,
    };
  }

  private async verifyTurn(
    view: TurnView | PendingView,
    raw: string,
    ...specPath: (string | number)[]
  ): Promise<void> {
    try {
      const computed = await specChecksumFromBody(raw, ...specPath);
      view.checksumOk = computed === view.checksum;
    } catch {
      view.checksumOk = false;
    }
    this.notify();
  }

  // --------------------------------------------------------- submitting

  /** Send an instruction (or a correction — the server treats both the
   * same).  In review mode this only translates; nothing moves until
   * `confirmExecution`.  Returns once the turn settles. */
  async submitInstruction(text: string): Promise<void> {
    if (this.state.phase !== "idle" && this.state.phase !== "reviewing") {
      this.state.notice = BUSY_NOTICE;
      this.notify();
      return;
    }
    this.state.notice = null;
    this.state.error = null;
    this.state.phase = "translating";
    this.notify();
    try {
      if (this.state.mode === "review") {
        const { value, raw } = await this.api.translateOnly(this.sessionId, text);
        this.stagePending(value, raw);
      } else {
        const { value, raw } = await this.api.instruct(this.sessionId, text);
        this.appendTurn(value, raw);
        this.state.phase = "idle";
      }
    } catch (err) {
      this.absorbError(err);
    }
    this.notify();
  }

  private stagePending(artifacts: ArtifactsPayload, raw: string): void {
    const prev = this.lastSpec();
    const pending: PendingView = {
      instruction: artifacts.instruction,
      descriptorText: artifacts.descriptor_text,
      scriptText: artifacts.script_text,
      spec: artifacts.spec,
      checksum: artifacts.checksum,
      checksumOk: null,
      diff: specDiff(prev, artifacts.spec),
    };
    this.state.pending = pending;
    this.state.phase = "reviewing";
    void this.verifyTurn(pending, raw, "spec");
  }

  /** Operator confirmed the reviewed plan: only now does an execution
   * request leave the client. */
  async confirmExecution(): Promise<void> {
    if (this.state.pending === null) {
      this.state.notice = "Nothing is staged for execution.";
      this.notify();
      return;
    }
    this.state.phase = "executing";
    this.state.notice = null;
    this.notify();
    try {
      const { value, raw } = await this.api.executePending(this.sessionId);
      this.state.pending = null;
      this.appendTurn(value, raw);
      this.state.phase = "idle";
    } catch (err) {
      this.absorbError(err);
    }
    this.notify();
  }

  /** Drop the staged plan client-side; the server simply overwrites it on
   * the next translation. */
  discardPending(): void {
    this.state.pending = null;
    this.state.phase = "idle";
    this.state.notice = "Discarded the staged plan.";
    this.notify();
  }

  async reset(): Promise<void> {
    const { value } = await this.api.reset(this.sessionId);
    this.state.summary = value;
    this.state.liveFrames = [];
    this.state.diagnostics = [];
    this.state.pending = null;
    this.state.phase = "idle";
    // turn history intentionally survives a reset, mirroring the server
    this.notify();
  }

  private appendTurn(payload: TurnPayload, raw: string): void {
    const view = this.turnView(payload, this.lastSpec());
    this.state.turns.push(view);
    this.state.currentState = payload.final_state;
    this.state.notice = null; // a landed turn makes any busy notice stale
    if (this.state.summary) {
      this.state.summary.turns = this.state.turns.length;
      this.state.summary.spec_checksum = payload.checksum;
    }
    void this.verifyTurn(view, raw, "spec");
  }

  private lastSpec(): SpecDoc | null {
    const last = this.state.turns[this.state.turns.length - 1];
    return last ? last.spec : null;
  }

  private absorbError(err: unknown): void {
    if (err instanceof ApiError && err.isBusy) {
      this.state.notice = BUSY_NOTICE;
      this.state.phase = this.state.pending ? "reviewing" : "idle";
      return;
    }
    if (err instanceof ApiError) {
      this.state.error = {
        message: err.detail,
        attempts: err.attempts,
        lastCompletion: err.lastCompletion,
      };
      this.state.phase = this.state.pending ? "reviewing" : "idle";
      return;
    }
    this.state.error = { message: String(err) };
    this.state.phase = "idle";
  }

  // ------------------------------------------------------------- stream

  handleEvent(event: SessionEvent): void {
    switch (event.type) {
      case "turn-started":
        this.state.phase = "translating";
        this.state.notice = null;
        break;
      case "turn-translated":
        if (this.state.mode === "auto") this.state.phase = "executing";
        break;
      case "frame":
        this.state.liveFrames.push(event);
        if (this.state.liveFrames.length > this.frameBuffer) {
          this.state.liveFrames.splice(0, this.state.liveFrames.length - this.frameBuffer);
        }
        this.state.currentState = event.state;
        break;
      case "diagnostics":
        this.state.diagnostics.push(event);
        if (this.state.diagnostics.length > this.frameBuffer) {
          this.state.diagnostics.splice(0, this.state.diagnostics.length - this.frameBuffer);
        }
        break;
      case "turn-finished":
        this.state.currentState = event.final_state;
        this.state.phase = this.state.pending ? "reviewing" : "idle";
        break;
      case "turn-failed":
        this.state.error = { message: event.error };
        break;
      case "reset":
        this.state.liveFrames = [];
        this.state.diagnostics = [];
        this.state.currentState = event.state;
        break;
    }
    this.notify();
  }

  markGap(from: number, to: number): void {
    this.state.gaps.push({ from, to });
    this.notify();
  }

  setStreamStatus(status: StoreState["streamStatus"]): void {
    this.state.streamStatus = status;
    this.notify();
  }
}
