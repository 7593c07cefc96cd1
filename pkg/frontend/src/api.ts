// Thin client for the generation service's JSON API.

import type { GenerateResponse, HealthResponse } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number, readonly detail?: unknown) {
    super(message);
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  async health(): Promise<HealthResponse> {
    const response = await fetch(`${this.baseUrl}/api/health`);
    if (!response.ok) {
      throw new ApiError(`health check failed (${response.status})`, response.status);
    }
    return (await response.json()) as HealthResponse;
  }

  async generate(query: string, k?: number, threshold?: number): Promise<GenerateResponse> {
    const payload: Record<string, unknown> = { query };
    if (k !== undefined) payload.k = k;
    if (threshold !== undefined) payload.threshold = threshold;
    const response = await fetch(`${this.baseUrl}/api/generate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    const body = await response.json();
    if (!response.ok) {
      const message = typeof body?.message === "string" ? body.message : `HTTP ${response.status}`;
      throw new ApiError(message, response.status, body);
    }
    return body as GenerateResponse;
  }
}
