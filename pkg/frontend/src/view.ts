// DOM rendering of a verification record. Every verdict field (label,
// confidence, reasoning, snippet texts, guidance) is rendered verbatim
// from the API payload.

import { badgeClass } from "./badges.js";
import type { VerificationRecord } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderVerification(
  record: VerificationRecord,
  onExport: (verificationId: string) => void,
): HTMLElement {
  const result = record.result;
  const root = el("article", "verification");
  root.dataset.verificationId = record.verification_id;

  const echo = el("div", "request-echo");
  echo.appendChild(el("div", "echo-citation", `Citation: ${record.citation}`));
  echo.appendChild(el("div", "echo-claim", `Claim: ${record.claim}`));
  echo.appendChild(el("div", "echo-doc", `Document: ${record.doc_id}`));
  root.appendChild(echo);

  const header = el("div", "verdict-header");
  const badge = el("span", badgeClass(result.label), result.label);
  header.appendChild(badge);
  header.appendChild(
    el("span", "confidence", `confidence ${result.confidence.toFixed(2)}`),
  );
  root.appendChild(header);

  root.appendChild(el("p", "guidance", result.guidance));

  const reasoning = el("section", "reasoning");
  reasoning.appendChild(el("p", "reasoning-summary", result.reasoning.summary));
  if (result.reasoning.points.length > 0) {
    const details = el("details", "reasoning-points");
    details.appendChild(el("summary", undefined, `analysis (${result.reasoning.points.length} points)`));
    const list = el("ul");
    for (const point of result.reasoning.points) {
      list.appendChild(el("li", undefined, point));
    }
    details.appendChild(list);
    reasoning.appendChild(details);
  }
  root.appendChild(reasoning);

  const evidence = el("section", "evidence");
  evidence.appendChild(el("h3", undefined, `Evidence (${result.evidence.length})`));
  if (result.evidence.length === 0) {
    evidence.appendChild(el("p", "no-evidence", "No evidence snippets."));
  }
  for (const snippet of result.evidence) {
    const item = el("figure", "snippet");
    item.appendChild(el("blockquote", "snippet-text", snippet.text));
    const [docId, chunkIndex] = snippet.chunk_ref;
    let location = `relevance ${snippet.relevance.toFixed(3)}, chunk ${chunkIndex} of ${docId}`;
    if (snippet.char_span) {
      location += `, chars ${snippet.char_span[0]}-${snippet.char_span[1]}`;
    }
    item.appendChild(el("figcaption", "snippet-location", location));
    evidence.appendChild(item);
  }
  root.appendChild(evidence);

  const prov = result.provenance;
  const provenance = el("details", "provenance");
  provenance.appendChild(el("summary", undefined, "provenance"));
  const dl = el("dl");
  const rows: [string, string][] = [
    ["processed at", prov.processed_at],
    ["chat model", prov.chat_model],
    ["embedding model", prov.embedding_model],
    ["reranker", prov.reranker_id],
    ["system version", prov.system_version],
    ["abstract only", String(prov.abstract_only)],
    ["rule-based preprocessing", String(prov.rule_based)],
  ];
  for (const [key, value] of rows) {
    dl.appendChild(el("dt", undefined, key));
    dl.appendChild(el("dd", undefined, value));
  }
  provenance.appendChild(dl);
  if (prov.warnings.length > 0) {
    const warnings = el("ul", "warnings");
    for (const warning of prov.warnings) warnings.appendChild(el("li", undefined, warning));
    provenance.appendChild(warnings);
  }
  root.appendChild(provenance);

  const exportButton = el("button", "export-button", "Export markdown");
  exportButton.type = "button";
  exportButton.addEventListener("click", () => onExport(record.verification_id));
  root.appendChild(exportButton);

  return root;
}
