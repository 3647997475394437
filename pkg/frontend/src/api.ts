// Thin typed client over the documented HTTP API. Every mutation the UI
// can perform goes through exactly one of these calls; there is no other
// channel to the server.

import type {
  ClipRecord,
  Diagnostic,
  ErrorDetail,
  GraphView,
  PlanView,
  RequestsDoc,
  SampleView,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: ErrorDetail,
  ) {
    super(detail.message ?? `HTTP ${status}`);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T & { revision: number }> {
  const response = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const detail: ErrorDetail =
      typeof body?.detail === "object" && body.detail !== null
        ? body.detail
        : { message: String(body?.detail ?? response.statusText) };
    throw new ApiError(response.status, detail);
  }
  return body as T & { revision: number };
}

export class ApiClient {
  constructor(public base: string = "") {}

  getGraph() {
    return request<{ graph: GraphView }>(this.base, "/graph");
  }

  postClip(clip: ClipRecord) {
    return request<{ clip: ClipRecord }>(this.base, "/clips", {
      method: "POST",
      body: JSON.stringify(clip),
    });
  }

  patchClip(clipId: string, fields: Partial<ClipRecord>) {
    return request<{ clip: ClipRecord }>(this.base, `/clips/${encodeURIComponent(clipId)}`, {
      method: "PATCH",
      body: JSON.stringify(fields),
    });
  }

  deleteClip(clipId: string, force = false) {
    const qs = force ? "?force=true" : "";
    return request<{ removed: string[] }>(this.base, `/clips/${encodeURIComponent(clipId)}${qs}`, {
      method: "DELETE",
    });
  }

  getValidate() {
    return request<{ diagnostics: Diagnostic[] }>(this.base, "/validate");
  }

  getExpand(start?: string) {
    const qs = start ? `?start=${encodeURIComponent(start)}` : "";
    return request<{ machine: { nodes: string[]; edges: unknown[] } }>(
      this.base,
      `/expand${qs}`,
    );
  }

  postPlan(requests: RequestsDoc, now = 0, seed = 0) {
    return request<{ plan: PlanView; dropped: Diagnostic[] }>(this.base, "/plan", {
      method: "POST",
      body: JSON.stringify({ ...requests, now, seed }),
    });
  }

  postSample(plan: PlanView, seed: number, updateCounters = false) {
    return request<SampleView>(this.base, "/sample", {
      method: "POST",
      body: JSON.stringify({ plan, seed, update_counters: updateCounters }),
    });
  }
}
