// Typed client over the documented endpoints. Every mutation goes through
// here; no other code talks to the network.

import {
  CutPayload,
  DeltaPayload,
  RefinementDecision,
  RefinementResult,
  ServiceError,
  ServiceErrorBody,
  SessionView,
  VariantsPayload,
} from "./types.js";

async function parseError(response: Response): Promise<ServiceError> {
  let code = "unknown";
  let message = response.statusText;
  try {
    const body = (await response.json()) as ServiceErrorBody;
    code = body.error.code;
    message = body.error.message;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ServiceError(response.status, code, message);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body ?? {}),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  variants(): Promise<VariantsPayload> {
    return this.get("/variants");
  }

  lineCut(level: number): Promise<CutPayload> {
    return this.get(`/line/cut?level=${encodeURIComponent(level)}`);
  }

  lineDiff(variantId: string): Promise<DeltaPayload> {
    return this.get(`/line/diff?variant=${encodeURIComponent(variantId)}`);
  }

  selectVariant(variantId: string): Promise<{ selected_variant_id: string }> {
    return this.post("/selection", { variant_id: variantId });
  }

  createSession(): Promise<{ id: string; phase: string }> {
    return this.post("/sessions", {});
  }

  sessionAction(sessionId: string, type: string, payload: Record<string, unknown>): Promise<SessionView> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/actions`, { type, payload });
  }

  session(sessionId: string): Promise<SessionView> {
    return this.get(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  postLog(text: string): Promise<{ events: number; warnings: string[] }> {
    return this.post("/logs", { text });
  }

  runDiscovery(): Promise<unknown> {
    return this.post("/discovery", {});
  }

  computeDelta(variantId?: string): Promise<DeltaPayload> {
    return this.post("/delta", variantId ? { variant_id: variantId } : {});
  }

  submitDecisions(decisions: RefinementDecision[], theta = 0.5): Promise<RefinementResult> {
    return this.post("/refinement/decisions", { decisions, theta });
  }
}
