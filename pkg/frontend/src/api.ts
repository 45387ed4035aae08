import type { Diagnostic, EffectEntry, EffectSpec, MaskRequest, SessionSummary } from "./types.js";

export class ApiError extends Error {
  status: number;
  diagnostics: Diagnostic[];

  constructor(status: number, message: string, diagnostics: Diagnostic[] = []) {
    super(message);
    this.status = status;
    this.diagnostics = diagnostics;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin client over the authoring service; every pixel the UI shows comes
 * back through these calls. The fetch implementation is injected so tests
 * can stub or redirect it. */
export class ApiClient {
  private base: string;
  private fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    if (!response.ok) {
      throw await this.toError(response);
    }
    return (await response.json()) as T;
  }

  private async toError(response: Response): Promise<ApiError> {
    let message = `request failed (${response.status})`;
    let diagnostics: Diagnostic[] = [];
    try {
      const body = await response.json();
      if (typeof body.error === "string") message = body.error;
      if (Array.isArray(body.diagnostics)) diagnostics = body.diagnostics;
    } catch {
      // non-JSON error body; keep the generic message
    }
    return new ApiError(response.status, message, diagnostics);
  }

  createSession(body: Record<string, unknown>): Promise<SessionSummary> {
    return this.request("/api/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getSession(id: string): Promise<SessionSummary> {
    return this.request(`/api/sessions/${id}`);
  }

  projectorImageUrl(id: string): string {
    return `${this.base}/api/sessions/${id}/projector-image`;
  }

  maskUrl(id: string, maskId: string): string {
    return `${this.base}/api/sessions/${id}/masks/${maskId}`;
  }

  createMask(id: string, body: MaskRequest): Promise<{ id: string; member_count: number }> {
    return this.request(`/api/sessions/${id}/masks`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createEffect(id: string, spec: Partial<EffectSpec>): Promise<{ id: string }> {
    return this.request(`/api/sessions/${id}/effects`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(spec),
    });
  }

  listEffects(id: string): Promise<EffectEntry[]> {
    return this.request(`/api/sessions/${id}/effects`);
  }

  frameUrl(id: string, effectId: string, t: number): string {
    return `${this.base}/api/sessions/${id}/effects/${effectId}/frame?t=${t}`;
  }

  /** Fetch one preview frame as raw PNG bytes. */
  async fetchFrame(id: string, effectId: string, t: number): Promise<Uint8Array> {
    const response = await this.fetchImpl(this.frameUrl(id, effectId, t));
    if (!response.ok) {
      throw await this.toError(response);
    }
    return new Uint8Array(await response.arrayBuffer());
  }
}
