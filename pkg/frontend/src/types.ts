// Wire types for the session-service HTTP + WebSocket API.  Everything the
// UI shows is derived from these payloads; the client runs no physics and
// recomputes no rewards.

export interface NormDoc {
  kind: string;
  epsilon?: number;
}

export interface TermDoc {
  id: string;
  residual_fn: string;
  params: Record<string, unknown>;
  weight: number;
  norm: NormDoc;
}

export interface SpecDoc {
  version: number;
  plan_duration: number;
  terms: TermDoc[];
}

export interface SessionSummary {
  id: string;
  embodiment: string;
  scene: string;
  turns: number;
  busy: boolean;
  pending: boolean;
  spec_checksum: string;
}

// POST /sessions/{id}/translations — a translated turn staged for review.
export interface ArtifactsPayload {
  instruction: string;
  descriptor_text: string;
  script_text: string;
  plan_duration: number;
  descriptor_retries: number;
  coder_retries: number;
  checksum: string;
  spec: SpecDoc;
}

// POST /sessions/{id}/instructions, /executions, and entries of turn_history.
export interface TurnPayload extends ArtifactsPayload {
  index: number;
  seed: number;
  frames: number;
  dt: number;
  backend: string;
  final_state: number[];
  started_at: number;
  finished_at: number;
}

export interface SessionDetail extends SessionSummary {
  state: number[];
  turn_history: TurnPayload[];
}

export interface ReplayFrameDoc {
  t: number;
  state: number[];
  action: number[];
  reward: number;
  spec_checksum: string;
}

export interface ReplayDoc {
  version: number;
  embodiment: string;
  scene: string;
  planner: Record<string, unknown>;
  embodiment_config: Record<string, unknown>;
  config_checksum: string;
  specs: Record<string, SpecDoc>;
  dt: number;
  backend: string;
  seed: number;
  frames: ReplayFrameDoc[];
  final_state: number[];
  sha256?: string;
}

// ------------------------------------------------------------- events

export interface BaseEvent {
  seq: number;
  type: string;
}

export interface TurnStartedEvent extends BaseEvent {
  type: "turn-started";
  turn: number;
  instruction: string;
}

export interface TurnTranslatedEvent extends BaseEvent {
  type: "turn-translated";
  turn: number;
  spec_checksum: string;
  plan_duration: number;
}

export interface FrameEvent extends BaseEvent {
  type: "frame";
  turn: number;
  t: number;
  state: number[];
  reward: number;
  spec_checksum: string;
}

export interface DiagnosticsEvent extends BaseEvent {
  type: "diagnostics";
  turn: number;
  step: number;
  t: number;
  J: number;
  iterations: number;
  reward: number;
}

export interface TurnFinishedEvent extends BaseEvent {
  type: "turn-finished";
  turn: number;
  frames: number;
  final_state: number[];
  spec_checksum: string;
}

export interface TurnFailedEvent extends BaseEvent {
  type: "turn-failed";
  turn: number;
  error: string;
}

export interface ResetEvent extends BaseEvent {
  type: "reset";
  state: number[];
}

export type SessionEvent =
  | TurnStartedEvent
  | TurnTranslatedEvent
  | FrameEvent
  | DiagnosticsEvent
  | TurnFinishedEvent
  | TurnFailedEvent
  | ResetEvent;

// --------------------------------------------------------- state layout
// The replay/frame `state` vector layouts, as documented by the service.

export const QUAD_LAYOUT = {
  pos: [0, 1, 2],
  rpy: [3, 4, 5],
  velXy: [6, 7],
  yawRate: 8,
  // feet are (x, y, z) triples in the heading-aligned torso frame
  feet: {
    front_left: 9,
    back_left: 12,
    front_right: 15,
    back_right: 18,
  } as Record<string, number>,
  time: 21,
  dim: 22,
} as const;

export const MANIP_LAYOUT = {
  palm: [0, 1, 2],
  palmVel: [3, 4, 5],
  gripper: 6,
  jointSpeed: 7,
  // each object: pos(3), vel(3), rotation, held
  objects: { apple: 8, banana: 16, box: 24, bowl: 32 } as Record<string, number>,
  drawer: 40,
  faucet: 41,
  time: 42,
  dim: 43,
} as const;
