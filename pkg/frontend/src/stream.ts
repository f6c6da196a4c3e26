// WebSocket event channel with reconnection and gap marking.
//
// The service's event bus drops oldest events when a consumer lags, and a
// dropped connection misses events outright, so `seq` can jump.  Every jump
// is surfaced as a gap marker instead of being silently ignored.

import type { SessionEvent } from "./types.js";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ChannelHandlers {
  onEvent: (event: SessionEvent) => void;
  /** Called with the inclusive seq range [from, to] that was never seen. */
  onGap?: (from: number, to: number) => void;
  onStatus?: (status: "connected" | "reconnecting" | "closed") => void;
}

const defaultFactory: SocketFactory = (url) => new WebSocket(url) as unknown as SocketLike;

export class EventChannel {
  private socket: SocketLike | null = null;
  private lastSeq = -1;
  private attempts = 0;
  private stopped = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly handlers: ChannelHandlers,
    private readonly socketFactory: SocketFactory = defaultFactory,
  ) {}

  connect(): void {
    this.stopped = false;
    this.open();
  }

  close(): void {
    this.stopped = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.socket?.close();
    this.socket = null;
    this.handlers.onStatus?.("closed");
  }

  private open(): void {
    const socket = this.socketFactory(this.url);
    this.socket = socket;

    socket.onopen = () => {
      this.attempts = 0;
      this.handlers.onStatus?.("connected");
    };

    socket.onmessage = (message) => {
      const event = JSON.parse(String(message.data)) as SessionEvent;
      if (this.lastSeq >= 0 && event.seq > this.lastSeq + 1) {
        this.handlers.onGap?.(this.lastSeq + 1, event.seq - 1);
      }
      if (event.seq > this.lastSeq) this.lastSeq = event.seq;
      this.handlers.onEvent(event);
    };

    socket.onclose = () => {
      if (this.stopped) return;
      this.handlers.onStatus?.("reconnecting");
      const timeout = Math.min(1000 * 2 ** this.attempts, 30000);
      this.attempts++;
      this.timer = setTimeout(() => this.open(), timeout);
    };

    socket.onerror = () => {
      // onclose follows; nothing extra to do
    };
  }
}
