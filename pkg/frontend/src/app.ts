// Wires the pieces into one page: chat pane on the left, scene canvas with
// diagnostics sparkline on the right, reward-term inspector with diff
// highlighting and the recorded-turn scrubber below.

import { ApiClient } from "./api.js";
import { renderChat } from "./render/chat.js";
import { drawScene, type Ctx2D } from "./render/scene.js";
import { Scrubber } from "./render/scrubber.js";
import { drawSparkline } from "./render/sparkline.js";
import { renderTermTable } from "./render/termTable.js";
import { SessionStore } from "./store.js";
import { EventChannel, type SocketFactory } from "./stream.js";

const SCENE_W = 640;
const SCENE_H = 320;
const SPARK_W = 640;
const SPARK_H = 60;

export interface App {
  store: SessionStore;
  channel: EventChannel | null;
  start(embodiment: string, scene?: string, seed?: number): Promise<void>;
  attach(sessionId: string): Promise<void>;
}

export function createApp(
  root: HTMLElement,
  api: ApiClient,
  socketFactory?: SocketFactory,
): App {
  const store = new SessionStore(api);

  root.textContent = "";
  root.className = "nl2mpc-app";
  const chatPane = document.createElement("div");
  chatPane.className = "pane chat-pane";
  const scenePane = document.createElement("div");
  scenePane.className = "pane scene-pane";
  const specPane = document.createElement("div");
  specPane.className = "pane spec-pane";

  const status = document.createElement("div");
  status.className = "stream-status";
  const sceneCanvas = document.createElement("canvas");
  sceneCanvas.width = SCENE_W;
  sceneCanvas.height = SCENE_H;
  const sparkCanvas = document.createElement("canvas");
  sparkCanvas.width = SPARK_W;
  sparkCanvas.height = SPARK_H;

  const scrubber = new Scrubber(api, () => store.sessionId, {
    onFrame: (state) => {
      const ctx = sceneCanvas.getContext("2d") as Ctx2D | null;
      if (ctx) drawScene(ctx, store.state.summary?.embodiment ?? "", state, SCENE_W, SCENE_H);
    },
  });

  scenePane.append(status, sceneCanvas, scrubber.element, sparkCanvas);
  const termTableEl = document.createElement("div");
  specPane.appendChild(termTableEl);
  root.append(chatPane, scenePane, specPane);

  const handlers = {
    onSubmit: (text: string) => void store.submitInstruction(text),
    onConfirm: () => void store.confirmExecution(),
    onDiscard: () => store.discardPending(),
    onModeChange: (mode: "auto" | "review") => store.setMode(mode),
    onReset: () => void store.reset(),
  };

  let lastTurnCount = -1;
  store.subscribe((state) => {
    renderChat(chatPane, state, handlers);

    const latest = state.pending ?? state.turns[state.turns.length - 1];
    if (latest) {
      renderTermTable(termTableEl, {
        spec: latest.spec,
        checksum: latest.checksum,
        checksumOk: latest.checksumOk,
        diff: latest.diff,
      });
    }

    const sceneCtx = sceneCanvas.getContext("2d") as Ctx2D | null;
    if (sceneCtx) {
      drawScene(
        sceneCtx,
        state.summary?.embodiment ?? "",
        state.currentState,
        SCENE_W,
        SCENE_H,
      );
    }
    const sparkCtx = sparkCanvas.getContext("2d") as Ctx2D | null;
    if (sparkCtx) {
      drawSparkline(sparkCtx, state.diagnostics.map((d) => d.J), SPARK_W, SPARK_H);
    }

    if (state.turns.length !== lastTurnCount) {
      lastTurnCount = state.turns.length;
      scrubber.setTurnCount(state.turns.length);
    }
    status.textContent =
      state.streamStatus === "connected"
        ? `● live (${state.gaps.length ? `${state.gaps.length} gap(s)` : "no gaps"})`
        : `○ ${state.streamStatus}`;
    status.dataset.status = state.streamStatus;
  });

  let channel: EventChannel | null = null;

  function openStream(): void {
    channel?.close();
    channel = new EventChannel(
      api.streamUrl(store.sessionId),
      {
        onEvent: (event) => store.handleEvent(event),
        onGap: (from, to) => store.markGap(from, to),
        onStatus: (s) => store.setStreamStatus(s),
      },
      socketFactory,
    );
    channel.connect();
    app.channel = channel;
  }

  const app: App = {
    store,
    channel,
    async start(embodiment: string, scene?: string, seed = 0) {
      await store.create(embodiment, scene, seed);
      openStream();
    },
    async attach(sessionId: string) {
      await store.attach(sessionId);
      openStream();
    },
  };
  return app;
}
