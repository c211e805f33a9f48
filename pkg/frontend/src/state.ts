import type { AnalyzeResponse, ViewportSpec } from "./types";

/** Client-side session mirror; all analytical state lives on the server. */
export type UiSessionState = {
  sessionId: string | null;
  viewport: ViewportSpec;
  lastResponse: AnalyzeResponse | null;
  analyzeInFlight: boolean;
  lastError: string | null;
};

export function initialState(viewport: ViewportSpec): UiSessionState {
  return {
    sessionId: null,
    viewport,
    lastResponse: null,
    analyzeInFlight: false,
    lastError: null,
  };
}

/**
 * Analyze cadence: a manual trigger plus an optional periodic policy, with
 * at most one request in flight. A failed call surfaces through onError and
 * leaves the last good response untouched.
 */
export class AnalyzeScheduler {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly state: UiSessionState,
    private readonly runAnalyze: () => Promise<AnalyzeResponse>,
    private readonly onResult: (response: AnalyzeResponse) => void,
    private readonly onError: (message: string) => void = () => undefined,
  ) {}

  async trigger(): Promise<AnalyzeResponse | null> {
    if (this.state.analyzeInFlight) return null;
    this.state.analyzeInFlight = true;
    try {
      const response = await this.runAnalyze();
      this.state.lastResponse = response;
      this.state.lastError = null;
      this.onResult(response);
      return response;
    } catch (err) {
      this.state.lastError = err instanceof Error ? err.message : String(err);
      this.onError(this.state.lastError);
      return null;
    } finally {
      this.state.analyzeInFlight = false;
    }
  }

  startPeriodic(everyMs: number): void {
    this.stopPeriodic();
    this.timer = setInterval(() => void this.trigger(), everyMs);
  }

  stopPeriodic(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
