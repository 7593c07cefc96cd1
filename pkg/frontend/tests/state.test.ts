import { describe, expect, it } from "vitest";

import { SessionState, validateControls } from "../src/state";
import type { GenerateResponse } from "../src/types";

const response = {
  query: "q",
  body: "b",
  references: [],
  citations: [],
  warnings: [],
  scored_articles: [],
  k: 4,
  threshold: 20,
} as GenerateResponse;

describe("validateControls", () => {
  it("accepts the API bounds", () => {
    expect(validateControls({ query: "新聞", k: 1, threshold: 0 })).toEqual([]);
    expect(validateControls({ query: "新聞", k: 50, threshold: 100 })).toEqual([]);
  });

  it("rejects out-of-bounds values before submission", () => {
    expect(validateControls({ query: "x", k: 0, threshold: 20 })).toHaveLength(1);
    expect(validateControls({ query: "x", k: 51, threshold: 20 })).toHaveLength(1);
    expect(validateControls({ query: "x", k: 4, threshold: -1 })).toHaveLength(1);
    expect(validateControls({ query: "x", k: 4, threshold: 101 })).toHaveLength(1);
    expect(validateControls({ query: "  ", k: 4, threshold: 20 })).toHaveLength(1);
  });
});

describe("SessionState", () => {
  it("keeps history client-side in submission order", () => {
    const state = new SessionState();
    state.recordResponse({ query: "a", k: 4, threshold: 20 }, response);
    state.recordResponse({ query: "b", k: 2, threshold: 60 }, { ...response, query: "b" });
    expect(state.history).toHaveLength(2);
    expect(state.history[0].controls.query).toBe("a");
    expect(state.latest?.query).toBe("b");
  });
});
