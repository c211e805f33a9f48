import type { RawEvent } from "./types";

/**
 * Client-side event throttle mirroring the service acceptance rule: the
 * first event is kept, then one per epsilon window (t - lastAccepted >= eps).
 * Throttling here means the server drops nothing we send, so the accepted
 * sequence equals what pushing the raw trace directly would keep.
 */
export class EventThrottle {
  private lastAccepted: number | null = null;

  constructor(readonly epsilonMs: number) {
    if (epsilonMs <= 0) throw new Error("epsilonMs must be > 0");
  }

  accept(t: number): boolean {
    if (this.lastAccepted !== null && t - this.lastAccepted < this.epsilonMs) {
      return false;
    }
    this.lastAccepted = t;
    return true;
  }

  reset(): void {
    this.lastAccepted = null;
  }
}

/**
 * Buffer of throttled events awaiting a flush to the service. The capture
 * layer flushes at least every epsilon while non-empty.
 */
export class EventBuffer {
  private buffer: RawEvent[] = [];

  push(event: RawEvent): void {
    this.buffer.push(event);
  }

  get size(): number {
    return this.buffer.length;
  }

  /** Returns the pending batch and clears the buffer. */
  drain(): RawEvent[] {
    const out = this.buffer;
    this.buffer = [];
    return out;
  }
}
