// 2D orthographic rollout rendering.  Quadruped: top-down and side
// projections (torso box, heading arrow, four feet).  Manipulator: top-down
// table with palm and objects, plus drawer/faucet fraction gauges.  Every
// residual the service can express is visible in these projections.

import { MANIP_LAYOUT, QUAD_LAYOUT } from "../types.js";

/** The subset of CanvasRenderingContext2D the renderers use; tests can
 * substitute a recording stub. */
export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  save(): void;
  restore(): void;
  translate(x: number, y: number): void;
  rotate(angle: number): void;
}

export interface Viewport {
  x: number;
  y: number;
  width: number;
  height: number;
  /** world metres per viewport half-width */
  range: number;
}

const TORSO_LENGTH = 0.6;
const TORSO_WIDTH = 0.35;

/** World position of each foot: layout stores feet in the heading-aligned
 * torso frame, so rotate by yaw and offset by the torso position. */
export function quadFeetWorld(state: number[]): Record<string, [number, number, number]> {
  const yaw = state[QUAD_LAYOUT.rpy[2]];
  const cos = Math.cos(yaw);
  const sin = Math.sin(yaw);
  const px = state[QUAD_LAYOUT.pos[0]];
  const py = state[QUAD_LAYOUT.pos[1]];
  const out: Record<string, [number, number, number]> = {};
  for (const [foot, base] of Object.entries(QUAD_LAYOUT.feet)) {
    const fx = state[base];
    const fy = state[base + 1];
    const fz = state[base + 2];
    out[foot] = [px + cos * fx - sin * fy, py + sin * fx + cos * fy, fz];
  }
  return out;
}

function toPx(vp: Viewport, wx: number, wy: number, cx: number, cy: number): [number, number] {
  const scale = vp.width / (2 * vp.range);
  // +y world is up/left-handed flip so the scene reads like a map
  return [vp.x + vp.width / 2 + (wx - cx) * scale, vp.y + vp.height / 2 - (wy - cy) * scale];
}

function frame(ctx: Ctx2D, vp: Viewport, label: string): void {
  ctx.strokeStyle = "#444";
  ctx.lineWidth = 1;
  ctx.strokeRect(vp.x, vp.y, vp.width, vp.height);
  ctx.fillStyle = "#888";
  ctx.font = "11px sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(label, vp.x + 6, vp.y + 14);
}

function drawQuadTopDown(ctx: Ctx2D, state: number[], vp: Viewport): void {
  frame(ctx, vp, "top-down");
  const px = state[QUAD_LAYOUT.pos[0]];
  const py = state[QUAD_LAYOUT.pos[1]];
  const yaw = state[QUAD_LAYOUT.rpy[2]];
  const scale = vp.width / (2 * vp.range);

  // torso box, rotated to the heading
  const [cx, cy] = toPx(vp, px, py, px, py);
  ctx.save();
  ctx.translate(cx, cy);
  ctx.rotate(-yaw);
  ctx.strokeStyle = "#6cf";
  ctx.lineWidth = 2;
  ctx.strokeRect(
    (-TORSO_LENGTH / 2) * scale,
    (-TORSO_WIDTH / 2) * scale,
    TORSO_LENGTH * scale,
    TORSO_WIDTH * scale,
  );
  // heading arrow out of the nose
  ctx.beginPath();
  ctx.moveTo(0, 0);
  ctx.lineTo((TORSO_LENGTH / 2 + 0.15) * scale, 0);
  ctx.lineTo((TORSO_LENGTH / 2 + 0.07) * scale, -0.05 * scale);
  ctx.stroke();
  ctx.restore();

  // feet
  const feet = quadFeetWorld(state);
  for (const [foot, [wx, wy, wz]] of Object.entries(feet)) {
    const [fx, fy] = toPx(vp, wx, wy, px, py);
    ctx.beginPath();
    ctx.arc(fx, fy, Math.max(2, 4 + wz * 14), 0, Math.PI * 2);
    ctx.fillStyle = foot.startsWith("front") ? "#fc6" : "#9c6";
    ctx.fill();
  }
}

function drawQuadSide(ctx: Ctx2D, state: number[], vp: Viewport): void {
  frame(ctx, vp, "side");
  const pz = state[QUAD_LAYOUT.pos[2]];
  const pitch = state[QUAD_LAYOUT.rpy[1]];
  const scale = vp.width / (2 * vp.range);
  const groundY = vp.y + vp.height - 16;
  const cx = vp.x + vp.width / 2;

  ctx.strokeStyle = "#666";
  ctx.beginPath();
  ctx.moveTo(vp.x, groundY);
  ctx.lineTo(vp.x + vp.width, groundY);
  ctx.stroke();

  ctx.save();
  ctx.translate(cx, groundY - pz * scale);
  // positive pitch tips the nose up; canvas y grows downward
  ctx.rotate(-pitch);
  ctx.strokeStyle = "#6cf";
  ctx.lineWidth = 2;
  ctx.strokeRect((-TORSO_LENGTH / 2) * scale, -4, TORSO_LENGTH * scale, 8);
  ctx.restore();

  const feet = quadFeetWorld(state);
  const yaw = state[QUAD_LAYOUT.rpy[2]];
  const px = state[QUAD_LAYOUT.pos[0]];
  for (const [foot, [wx, , wz]] of Object.entries(feet)) {
    // project onto the heading axis so "front" stays on the right
    const along = (wx - px) * Math.cos(-yaw);
    const fx = cx + along * scale;
    const fy = groundY - wz * scale;
    ctx.beginPath();
    ctx.arc(fx, fy, 4, 0, Math.PI * 2);
    ctx.fillStyle = foot.startsWith("front") ? "#fc6" : "#9c6";
    ctx.fill();
  }
}

function gauge(ctx: Ctx2D, x: number, y: number, w: number, label: string, fraction: number): void {
  const f = Math.min(1, Math.max(0, fraction));
  ctx.strokeStyle = "#666";
  ctx.lineWidth = 1;
  ctx.strokeRect(x, y, w, 10);
  ctx.fillStyle = "#6c6";
  ctx.fillRect(x, y, w * f, 10);
  ctx.fillStyle = "#aaa";
  ctx.font = "10px sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(`${label} ${(f * 100).toFixed(0)}%`, x + w + 8, y + 9);
}

function drawManipulator(ctx: Ctx2D, state: number[], vp: Viewport): void {
  frame(ctx, vp, "tabletop");
  const center: [number, number] = [0.3, 0];

  // palm
  const [hx, hy] = toPx(vp, state[MANIP_LAYOUT.palm[0]], state[MANIP_LAYOUT.palm[1]], ...center);
  const gripper = state[MANIP_LAYOUT.gripper];
  ctx.beginPath();
  ctx.arc(hx, hy, 6 + gripper * 4, 0, Math.PI * 2);
  ctx.strokeStyle = "#6cf";
  ctx.lineWidth = 2;
  ctx.stroke();

  // objects
  ctx.font = "10px sans-serif";
  ctx.textAlign = "left";
  for (const [name, base] of Object.entries(MANIP_LAYOUT.objects)) {
    const [ox, oy] = toPx(vp, state[base], state[base + 1], ...center);
    const held = state[base + 7] > 0.5;
    ctx.beginPath();
    ctx.arc(ox, oy, 5, 0, Math.PI * 2);
    ctx.fillStyle = held ? "#f96" : "#ca8";
    ctx.fill();
    ctx.fillStyle = "#aaa";
    ctx.fillText(name, ox + 8, oy + 3);
  }

  // articulated widgets
  gauge(ctx, vp.x + 12, vp.y + vp.height - 40, 80, "drawer", state[MANIP_LAYOUT.drawer]);
  gauge(ctx, vp.x + 12, vp.y + vp.height - 22, 80, "faucet", state[MANIP_LAYOUT.faucet]);
}

/** Render one frame's state.  Unknown embodiments and idle sessions
 * (state == null) draw just the empty viewports. */
export function drawScene(
  ctx: Ctx2D,
  embodiment: string,
  state: number[] | null,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  if (embodiment === "quadruped") {
    const half = Math.floor(width / 2);
    const top: Viewport = { x: 0, y: 0, width: half - 4, height, range: 1.2 };
    const side: Viewport = { x: half + 4, y: 0, width: half - 4, height, range: 1.2 };
    if (state === null) {
      frame(ctx, top, "top-down");
      frame(ctx, side, "side");
      return;
    }
    drawQuadTopDown(ctx, state, top);
    drawQuadSide(ctx, state, side);
  } else {
    const vp: Viewport = { x: 0, y: 0, width, height, range: 0.7 };
    if (state === null) {
      frame(ctx, vp, "tabletop");
      return;
    }
    drawManipulator(ctx, state, vp);
  }
}
