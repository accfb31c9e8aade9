// Thin client for the local design service.

import type { Config, CurvesResponse, MeshResponse } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number, readonly pointer?: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  private async post<T>(path: string, body: Config): Promise<T> {
    const r = await fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!r.ok) {
      const detail = await r.json().catch(() => ({}));
      throw new ApiError(detail.detail ?? r.statusText, r.status, detail.pointer);
    }
    return r.json() as Promise<T>;
  }

  async schema(): Promise<Record<string, unknown>> {
    const r = await fetch(this.base + "/api/schema");
    if (!r.ok) throw new ApiError(r.statusText, r.status);
    return r.json();
  }

  async presets(): Promise<Record<string, Config>> {
    const r = await fetch(this.base + "/api/presets");
    if (!r.ok) throw new ApiError(r.statusText, r.status);
    return r.json();
  }

  mesh(cfg: Config): Promise<MeshResponse> {
    return this.post<MeshResponse>("/api/mesh", cfg);
  }

  curves(cfg: Config): Promise<CurvesResponse> {
    return this.post<CurvesResponse>("/api/curves", cfg);
  }

  sequence(cfg: Config): Promise<Record<string, unknown>> {
    return this.post("/api/sequence", cfg);
  }
}
