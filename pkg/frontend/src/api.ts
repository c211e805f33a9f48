import type { AnalyzeResponse, FeedbackView, RawEvent, SessionStatus, ViewportSpec } from "./types";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

/** Thin client over the exploration service; all analysis stays server-side. */
export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // keep the status text
      }
      throw new ServiceError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  /** Multipart upload of a CSV/GeoJSON POI file; returns the dataset id. */
  async uploadDataset(file: Blob, filename: string, bins: Record<string, number[]> = {}):
      Promise<{ dataset_id: string; poi_count: number }> {
    const form = new FormData();
    form.append("file", file, filename);
    form.append("name", filename);
    form.append("bins", JSON.stringify(bins));
    return this.request("/datasets", { method: "POST", body: form });
  }

  async createSession(
    datasetId: string,
    viewport: ViewportSpec,
    config: Record<string, unknown> = {},
  ): Promise<string> {
    const body = await this.post<{ session_id: string }>("/sessions", {
      dataset_id: datasetId,
      viewport,
      config,
    });
    return body.session_id;
  }

  async pushEvents(sessionId: string, events: RawEvent[]): Promise<number> {
    const body = await this.post<{ accepted: number }>(
      `/sessions/${sessionId}/events`, { events });
    return body.accepted;
  }

  analyze(sessionId: string): Promise<AnalyzeResponse> {
    return this.post<AnalyzeResponse>(`/sessions/${sessionId}/analyze`, {});
  }

  feedback(sessionId: string): Promise<FeedbackView & { schema_version: number }> {
    return this.request(`/sessions/${sessionId}/feedback`);
  }

  status(sessionId: string): Promise<SessionStatus> {
    return this.request(`/sessions/${sessionId}`);
  }
}
