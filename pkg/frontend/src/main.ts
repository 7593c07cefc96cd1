// DOM wiring: submit a topic, render the article with citation anchors,
// the reference cards, the scoring transparency panel and any warnings.

import { ApiClient, ApiError } from "./api.js";
import {
  renderArticleHtml,
  renderReferencePanel,
  renderScorePanel,
  renderWarnings,
} from "./render.js";
import { SessionState, validateControls } from "./state.js";

const state = new SessionState();
const api = new ApiClient(
  (window as unknown as { SCORERAG_API_BASE?: string }).SCORERAG_API_BASE ?? "",
);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const queryInput = el<HTMLInputElement>("query");
const kInput = el<HTMLInputElement>("k");
const kValue = el<HTMLSpanElement>("k-value");
const thresholdInput = el<HTMLInputElement>("threshold");
const thresholdValue = el<HTMLSpanElement>("threshold-value");
const submitButton = el<HTMLButtonElement>("submit");
const statusLine = el<HTMLParagraphElement>("status");
const warningsBox = el<HTMLDivElement>("warnings");
const articleBox = el<HTMLDivElement>("article");
const referencesBox = el<HTMLDivElement>("references");
const scoresBox = el<HTMLDivElement>("scores");

function setPending(pending: boolean): void {
  state.pending = pending;
  submitButton.disabled = pending;
  queryInput.disabled = pending;
  kInput.disabled = pending;
  thresholdInput.disabled = pending;
  statusLine.textContent = pending ? "產生中…" : "";
}

function highlightReference(refNumber: number): void {
  document.querySelectorAll(".reference-card.highlight").forEach((card) => {
    card.classList.remove("highlight");
  });
  const card = document.getElementById(`ref-${refNumber}`);
  if (card) {
    card.classList.add("highlight");
    card.scrollIntoView({ behavior: "smooth", block: "center" });
  }
}

function renderResponse(): void {
  const response = state.latest;
  if (!response) return;
  warningsBox.innerHTML = renderWarnings(response.warnings);
  articleBox.innerHTML = renderArticleHtml(response.body, response.references.length);
  referencesBox.innerHTML = renderReferencePanel(response.references);
  scoresBox.innerHTML = renderScorePanel(response.scored_articles);
  articleBox.querySelectorAll<HTMLAnchorElement>("a.citation").forEach((anchor) => {
    anchor.addEventListener("click", (event) => {
      event.preventDefault();
      highlightReference(parseInt(anchor.dataset.ref ?? "0", 10));
    });
  });
  statusLine.textContent =
    `k=${response.k}, threshold=${response.threshold}; ` +
    `${response.references.length} 筆參考資料`;
}

async function submit(): Promise<void> {
  if (state.pending) return;
  const controls = {
    query: queryInput.value,
    k: parseInt(kInput.value, 10),
    threshold: parseFloat(thresholdInput.value),
  };
  const problems = validateControls(controls);
  if (problems.length > 0) {
    statusLine.textContent = problems.join("; ");
    return;
  }
  setPending(true);
  try {
    const response = await api.generate(controls.query, controls.k, controls.threshold);
    state.controls = controls;
    state.recordResponse(controls, response);
    setPending(false);
    renderResponse();
  } catch (error) {
    setPending(false);
    const message = error instanceof ApiError ? error.message : String(error);
    statusLine.innerHTML = "";
    const retry = document.createElement("button");
    retry.textContent = "重試";
    retry.addEventListener("click", () => void submit());
    statusLine.textContent = `請求失敗：${message} `;
    statusLine.appendChild(retry);
  }
}

kInput.addEventListener("input", () => (kValue.textContent = kInput.value));
thresholdInput.addEventListener("input", () => (thresholdValue.textContent = thresholdInput.value));
submitButton.addEventListener("click", () => void submit());
queryInput.addEventListener("keydown", (event) => {
  if (event.key === "Enter") void submit();
});

void api
  .health()
  .then((health) => {
    statusLine.textContent = `已連線：${health.corpus_records} 篇文章，${health.index_chunks} 個索引分塊`;
  })
  .catch(() => {
    statusLine.textContent = "無法連線到後端，請先啟動 scorerag serve。";
  });
