// Chat pane: instruction input, per-turn bubbles with the generated motion
// description and reward script side by side, busy/error notices, and the
// review-then-execute confirmation controls.

import type { StoreState, TurnView, PendingView } from "../store.js";

function panel(title: string, text: string): HTMLElement {
  const box = document.createElement("div");
  box.className = "artifact";
  const h = document.createElement("h4");
  h.textContent = title;
  const pre = document.createElement("pre");
  pre.textContent = text;
  box.append(h, pre);
  return box;
}

function artifactPair(view: TurnView | PendingView): HTMLElement {
  const details = document.createElement("details");
  const summary = document.createElement("summary");
  summary.textContent = "motion description + reward script";
  const pair = document.createElement("div");
  pair.className = "artifact-pair";
  pair.append(
    panel("motion description", view.descriptorText),
    panel("reward script", view.scriptText),
  );
  details.append(summary, pair);
  return details;
}

function turnBubble(view: TurnView): HTMLElement {
  const bubble = document.createElement("div");
  bubble.className = "turn";
  bubble.dataset.turn = String(view.index);

  const who = document.createElement("div");
  who.className = "instruction";
  who.textContent = `#${view.index} ${view.instruction}`;

  const meta = document.createElement("div");
  meta.className = "meta";
  meta.textContent = `${view.frames} frames · ${view.backend} · seed ${view.seed}`;

  bubble.append(who, artifactPair(view), meta);
  return bubble;
}

export interface ChatHandlers {
  onSubmit: (text: string) => void;
  onConfirm: () => void;
  onDiscard: () => void;
  onModeChange: (mode: "auto" | "review") => void;
  onReset: () => void;
}

export function renderChat(container: HTMLElement, state: StoreState, handlers: ChatHandlers): void {
  container.textContent = "";
  container.classList.add("chat");

  const log = document.createElement("div");
  log.className = "turn-log";
  for (const turn of state.turns) log.appendChild(turnBubble(turn));

  if (state.pending) {
    const review = document.createElement("div");
    review.className = "review";
    const heading = document.createElement("div");
    heading.className = "instruction";
    heading.textContent = `review: ${state.pending.instruction}`;
    review.append(heading, artifactPair(state.pending));

    const confirm = document.createElement("button");
    confirm.className = "confirm-execute";
    confirm.textContent = "Execute this plan";
    confirm.onclick = () => handlers.onConfirm();
    const discard = document.createElement("button");
    discard.className = "discard";
    discard.textContent = "Discard";
    discard.onclick = () => handlers.onDiscard();
    review.append(confirm, discard);
    log.appendChild(review);
  }
  container.appendChild(log);

  if (state.notice) {
    const notice = document.createElement("div");
    notice.className = "notice busy-notice";
    notice.textContent = state.notice;
    container.appendChild(notice);
  }

  if (state.error) {
    const err = document.createElement("div");
    err.className = "error";
    const msg = document.createElement("div");
    msg.textContent = state.error.attempts
      ? `translation failed after ${state.error.attempts} attempts: ${state.error.message}`
      : state.error.message;
    err.appendChild(msg);
    if (state.error.lastCompletion) {
      const details = document.createElement("details");
      const summary = document.createElement("summary");
      summary.textContent = "raw completion";
      const pre = document.createElement("pre");
      pre.textContent = state.error.lastCompletion;
      details.append(summary, pre);
      err.appendChild(details);
    }
    container.appendChild(err);
  }

  const form = document.createElement("form");
  form.className = "composer";
  const input = document.createElement("input");
  input.type = "text";
  input.name = "instruction";
  input.placeholder =
    state.turns.length === 0 ? "Tell the robot what to do…" : "Refine or correct…";
  const busy = state.phase === "translating" || state.phase === "executing";
  input.disabled = busy;
  const send = document.createElement("button");
  send.type = "submit";
  send.textContent = busy ? "working…" : "Send";
  send.disabled = busy;
  form.append(input, send);
  form.onsubmit = (ev) => {
    ev.preventDefault();
    if (input.value.trim()) handlers.onSubmit(input.value.trim());
    input.value = "";
  };
  container.appendChild(form);

  const controls = document.createElement("div");
  controls.className = "controls";
  const modeLabel = document.createElement("label");
  const mode = document.createElement("input");
  mode.type = "checkbox";
  mode.className = "mode-toggle";
  mode.checked = state.mode === "review";
  mode.onchange = () => handlers.onModeChange(mode.checked ? "review" : "auto");
  modeLabel.append(mode, document.createTextNode(" review before executing"));
  const reset = document.createElement("button");
  reset.className = "reset";
  reset.textContent = "Reset robot";
  reset.onclick = () => handlers.onReset();
  controls.append(modeLabel, reset);
  container.appendChild(controls);
}
