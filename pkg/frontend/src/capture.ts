import { EventBuffer, EventThrottle } from "./throttle";
import { canvasToScreen } from "./viewport";
import type { RawEvent } from "./types";

export type PointerSample = { px: number; py: number; t: number };

/**
 * Turns raw pointer samples into throttled center-origin events.
 *
 * Timestamps are milliseconds since capture start (the session clock).
 * The pending buffer is handed to a sink either when `flushIfDue` sees
 * epsilon elapse or when the pointer leaves the canvas.
 */
export class MouseCapture {
  private readonly throttle: EventThrottle;
  private readonly buffer = new EventBuffer();
  private lastFlush = 0;

  constructor(
    readonly epsilonMs: number,
    private readonly canvasSize: () => { width: number; height: number },
    private readonly sink: (batch: RawEvent[]) => void,
  ) {
    this.throttle = new EventThrottle(epsilonMs);
  }

  /** Feed one pointer sample; returns true when it was recorded. */
  pointerMove(sample: PointerSample): boolean {
    if (!this.throttle.accept(sample.t)) return false;
    const { width, height } = this.canvasSize();
    const { x, y } = canvasToScreen(sample.px, sample.py, width, height);
    this.buffer.push({ x: Math.round(x * 1000) / 1000, y: Math.round(y * 1000) / 1000, t: Math.round(sample.t) });
    return true;
  }

  /** Flush when epsilon has elapsed since the previous flush. */
  flushIfDue(now: number): void {
    if (this.buffer.size > 0 && now - this.lastFlush >= this.epsilonMs) {
      this.lastFlush = now;
      this.sink(this.buffer.drain());
    }
  }

  /** Pointer left the canvas: hand over whatever is pending. */
  pointerLeave(): void {
    if (this.buffer.size > 0) {
      this.sink(this.buffer.drain());
    }
  }

  get pending(): number {
    return this.buffer.size;
  }
}
