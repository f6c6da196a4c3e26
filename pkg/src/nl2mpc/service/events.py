"""Per-session event fan-out.

One writer (the turn executor) publishes; any number of subscribers read.
Every subscriber owns a bounded deque: when it falls behind, the oldest
buffered events are dropped and a counter records the gap.  Publishing
never blocks on a slow reader, and dropped events affect only the live
view; the turn recording is written elsewhere and is always complete.
"""

from __future__ import annotations

import itertools
import threading


class Subscription:
    def __init__(self, bus: "EventBus", buffer_size: int):
        from collections import deque

        self._bus = bus
        self._events = deque(maxlen=buffer_size)
        self._cond = threading.Condition()
        self.dropped = 0
        self.closed = False

    def _push(self, event: dict) -> None:
        with self._cond:
            if self.closed:
                return
            if len(self._events) == self._events.maxlen:
                self.dropped += 1
            self._events.append(event)
            self._cond.notify_all()

    def get(self, timeout: float | None = None) -> dict | None:
        """Next event, or None on timeout / after close."""
        with self._cond:
            if not self._events and not self.closed:
                self._cond.wait(timeout)
            if not self._events:
                return None
            return self._events.popleft()

    def drain(self) -> list[dict]:
        with self._cond:
            out = list(self._events)
            self._events.clear()
            return out

    def close(self) -> None:
        with self._cond:
            self.closed = True
            self._cond.notify_all()
        self._bus._remove(self)


class EventBus:
    def __init__(self, buffer_size: int = 256):
        if buffer_size < 1:
            raise ValueError(f"buffer_size must be >= 1, got {buffer_size}")
        self.buffer_size = buffer_size
        self._subs: list[Subscription] = []
        self._lock = threading.Lock()
        self._seq = itertools.count()

    def subscribe(self) -> Subscription:
        sub = Subscription(self, self.buffer_size)
        with self._lock:
            self._subs.append(sub)
        return sub

    def _remove(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subs:
                self._subs.remove(sub)

    def publish(self, event_type: str, **payload) -> dict:
        event = {"seq": next(self._seq), "type": event_type, **payload}
        with self._lock:
            subs = list(self._subs)
        for sub in subs:
            sub._push(event)
        return event

    @property
    def subscriber_count(self) -> int:
        with self._lock:
            return len(self._subs)
