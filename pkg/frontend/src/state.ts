// Session state: control values, bounds and client-side history.

import type { GenerateResponse } from "./types.js";

export const K_MIN = 1;
export const K_MAX = 50;
export const THRESHOLD_MIN = 0;
export const THRESHOLD_MAX = 100;

export interface Controls {
  query: string;
  k: number;
  threshold: number;
}

export interface HistoryEntry {
  controls: Controls;
  response: GenerateResponse;
}

export function validateControls(controls: Controls): string[] {
  const problems: string[] = [];
  if (!controls.query.trim()) problems.push("query must not be empty");
  if (!Number.isInteger(controls.k) || controls.k < K_MIN || controls.k > K_MAX) {
    problems.push(`k must be an integer in [${K_MIN}, ${K_MAX}]`);
  }
  if (controls.threshold < THRESHOLD_MIN || controls.threshold > THRESHOLD_MAX) {
    problems.push(`threshold must be in [${THRESHOLD_MIN}, ${THRESHOLD_MAX}]`);
  }
  return problems;
}

export class SessionState {
  controls: Controls = { query: "", k: 4, threshold: 20 };
  latest: GenerateResponse | null = null;
  history: HistoryEntry[] = [];
  pending = false;

  recordResponse(controls: Controls, response: GenerateResponse): void {
    this.latest = response;
    this.history.push({ controls: { ...controls }, response });
  }
}
