// Steering-loop integration test against the real backend in stub mode:
// raising the threshold and resubmitting never increases the number of
// rendered references.
//
// Spawns `scorerag serve` on a scratch workspace; requires the Python
// package to be installed (pip install -e .).

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { renderReferencePanel } from "../src/render";
import type { GenerateResponse } from "../src/types";

const PORT = 8946;
const BASE = `http://127.0.0.1:${PORT}`;

let workspace: string;
let server: ChildProcess | undefined;

async function waitForHealth(timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
  throw new Error("backend did not become healthy in time");
}

beforeAll(async () => {
  workspace = mkdtempSync(join(tmpdir(), "scorerag-ui-"));
  const config = join(workspace, "config.yaml");
  execFileSync("scorerag", ["demo", workspace], { stdio: "pipe" });
  execFileSync("scorerag", ["--config", config, "ingest", join(workspace, "raw")], { stdio: "pipe" });
  execFileSync("scorerag", ["--config", config, "index"], { stdio: "pipe" });
  server = spawn("scorerag", ["--config", config, "serve", "--port", String(PORT)], {
    stdio: "pipe",
  });
  await waitForHealth();
});

afterAll(() => {
  server?.kill("SIGTERM");
  if (workspace) rmSync(workspace, { recursive: true, force: true });
});

async function generate(threshold: number): Promise<GenerateResponse> {
  const response = await fetch(`${BASE}/api/generate`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ query: "美中官員會晤", threshold }),
  });
  expect(response.ok).toBe(true);
  return (await response.json()) as GenerateResponse;
}

function renderedReferenceCount(response: GenerateResponse): number {
  const panel = renderReferencePanel(response.references);
  return panel.split('class="reference-card"').length - 1;
}

describe("steering loop against the stub backend", () => {
  it("raising the threshold never increases the rendered reference count", async () => {
    const thresholds = [0, 20, 40, 60, 80, 100];
    const counts: number[] = [];
    for (const threshold of thresholds) {
      const response = await generate(threshold);
      expect(response.threshold).toBe(threshold);
      counts.push(renderedReferenceCount(response));
    }
    for (let i = 1; i < counts.length; i++) {
      expect(counts[i]).toBeLessThanOrEqual(counts[i - 1]);
    }
    // the sweep must actually shrink the set at some point
    expect(counts[counts.length - 1]).toBeLessThan(counts[0] + 1);
  });

  it("identical controls render identical content (UI state round-trip)", async () => {
    const first = await generate(20);
    const second = await generate(20);
    const firstNoTimings = { ...first, timings: undefined };
    const secondNoTimings = { ...second, timings: undefined };
    expect(secondNoTimings).toEqual(firstNoTimings);
    expect(renderReferencePanel(second.references)).toBe(renderReferencePanel(first.references));
  });

  it("every citation anchor in the rendered body targets an existing card", async () => {
    const response = await generate(20);
    const { renderArticleHtml } = await import("../src/render");
    const html = renderArticleHtml(response.body, response.references.length);
    const panel = renderReferencePanel(response.references);
    const targets = [...html.matchAll(/href="#(ref-\d+)"/g)].map((m) => m[1]);
    for (const target of targets) {
      expect(panel).toContain(`id="${target}"`);
    }
  });
});
