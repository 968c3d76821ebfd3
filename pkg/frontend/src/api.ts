import type {
  Cell,
  CreateSessionReply,
  MoveReply,
  PresetInfo,
  PublicState,
  StudySummary,
  TraceSummary,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public token: string,
    detail?: string,
  ) {
    super(detail ? `${token}: ${detail}` : token);
  }
}

async function parseError(response: Response): Promise<never> {
  let token = "http_error";
  let detail: string | undefined;
  try {
    const body = await response.json();
    token = body.error ?? token;
    detail = body.detail ?? JSON.stringify(body);
  } catch {
    // non-JSON error body; keep the generic token
  }
  throw new ApiRequestError(response.status, token, detail);
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as T;
  }

  createSession(participant: string, metadata: Record<string, unknown> = {}) {
    return this.request<CreateSessionReply>("/sessions", {
      method: "POST",
      body: JSON.stringify({ participant, metadata }),
    });
  }

  getState(sessionId: string) {
    return this.request<PublicState>(`/sessions/${sessionId}`);
  }

  submitMove(sessionId: string, a: Cell, b: Cell) {
    return this.request<MoveReply>(`/sessions/${sessionId}/moves`, {
      method: "POST",
      body: JSON.stringify({ a, b }),
    });
  }

  getTraces(sessionId: string) {
    return this.request<{ traces: TraceSummary[] }>(`/sessions/${sessionId}/traces`);
  }

  getPresets() {
    return this.request<{ presets: PresetInfo[] }>("/presets");
  }

  getStudySummary() {
    return this.request<StudySummary>("/study/summary");
  }
}
