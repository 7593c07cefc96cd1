// Pure rendering helpers, kept DOM-free so they are unit-testable.
//
// The article body is split into text and citation segments; in-range
// citations become anchors pointing at their reference card, out-of-range
// ones render as warning-styled plain text.

import type { GenerateResponse, ReferenceBlock, ScoredArticleRow } from "./types.js";

// same token grammar the backend validates: ASCII or full-width parens
const CITATION_RE = /[(（]\s*reference\s+(\d+)\s*[)）]/gi;

export type Segment =
  | { kind: "text"; text: string }
  | { kind: "citation"; refNumber: number; token: string; inRange: boolean };

export function segmentBody(body: string, refCount: number): Segment[] {
  const segments: Segment[] = [];
  let last = 0;
  for (const match of body.matchAll(CITATION_RE)) {
    const index = match.index ?? 0;
    if (index > last) {
      segments.push({ kind: "text", text: body.slice(last, index) });
    }
    const refNumber = parseInt(match[1], 10);
    segments.push({
      kind: "citation",
      refNumber,
      token: match[0],
      inRange: refNumber >= 1 && refNumber <= refCount,
    });
    last = index + match[0].length;
  }
  if (last < body.length) {
    segments.push({ kind: "text", text: body.slice(last) });
  }
  return segments;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderArticleHtml(body: string, refCount: number): string {
  const parts = segmentBody(body, refCount).map((segment) => {
    if (segment.kind === "text") {
      return escapeHtml(segment.text);
    }
    if (segment.inRange) {
      return (
        `<a class="citation" href="#ref-${segment.refNumber}" ` +
        `data-ref="${segment.refNumber}">${escapeHtml(segment.token)}</a>`
      );
    }
    return `<span class="citation-invalid" title="no such reference">${escapeHtml(segment.token)}</span>`;
  });
  return `<p class="article-body">${parts.join("")}</p>`;
}

export function renderReferenceCard(ref: ReferenceBlock): string {
  return [
    `<article class="reference-card" id="ref-${ref.ref_number}">`,
    `<header><span class="ref-number">Reference ${ref.ref_number}</span>`,
    `<span class="ref-date">${escapeHtml(ref.date)}</span>`,
    `<span class="ref-score">${ref.score.toFixed(2)}</span></header>`,
    `<h3>${escapeHtml(ref.title)}</h3>`,
    `<p>${escapeHtml(ref.summary)}</p>`,
    `</article>`,
  ].join("");
}

export function renderReferencePanel(refs: ReferenceBlock[]): string {
  if (refs.length === 0) {
    return `<p class="empty-state">沒有通過門檻的參考資料。</p>`;
  }
  return refs.map(renderReferenceCard).join("");
}

export function renderScoreRow(row: ScoredArticleRow): string {
  const scores = row.raw_scores.join("/");
  const cls = row.kept ? "score-row" : "score-row dropped";
  const note = row.kept ? "" : `<span class="drop-reason">${escapeHtml(row.drop_reason ?? "")}</span>`;
  return (
    `<tr class="${cls}" data-news-id="${row.news_id}">` +
    `<td>${escapeHtml(row.title)}</td>` +
    `<td>${scores} → ${row.mean_score.toFixed(2)}, ${row.band}</td>` +
    `<td>${note}</td></tr>`
  );
}

export function renderScorePanel(rows: ScoredArticleRow[]): string {
  if (rows.length === 0) {
    return `<p class="empty-state">此查詢沒有取得任何文章。</p>`;
  }
  const body = rows.map(renderScoreRow).join("");
  return (
    `<table class="score-table"><thead><tr>` +
    `<th>文章</th><th>評分（三次 → 平均, 區間）</th><th></th>` +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

export function renderWarnings(warnings: string[]): string {
  if (warnings.length === 0) return "";
  const items = warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("");
  return `<div class="warning-banner"><ul>${items}</ul></div>`;
}

export function renderedReferenceCount(response: GenerateResponse): number {
  return response.references.length;
}
