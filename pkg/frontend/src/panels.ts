// Side panels: live validation diagnostics for the current verse, the
// concordance entry of the selected headword, and token search with
// click-to-navigate.

import type { ApiClient } from "./api.js";
import type { EditorStore } from "./state.js";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export async function renderValidationPanel(
  panel: HTMLElement,
  api: ApiClient,
  store: EditorStore,
): Promise<void> {
  panel.textContent = "";
  if (!store.view.ref) return;
  const diagnostics = await api.validateVerse(store.view.ref);
  if (!diagnostics.length) {
    panel.append(el("div", "empty", "no diagnostics"));
    return;
  }
  for (const d of diagnostics) {
    const row = el("div", `diagnostic ${d.severity}`);
    row.append(el("span", "rule", d.rule));
    row.append(el("span", "message", d.message));
    panel.append(row);
  }
}

export async function renderConcordancePanel(
  panel: HTMLElement,
  api: ApiClient,
  store: EditorStore,
): Promise<void> {
  panel.textContent = "";
  const verse = store.verse;
  const position = store.view.selectedTargets[0];
  if (!verse || position === undefined) {
    panel.append(el("div", "empty", "select a target token"));
    return;
  }
  const lemma = verse.target[position]?.lemma;
  if (!lemma || lemma.kind !== "plain") {
    panel.append(el("div", "empty", "no headword on this row"));
    return;
  }
  const entry = await api.concordance(lemma.value);
  if (!entry) {
    panel.append(el("div", "empty", `no entry for ${lemma.value}`));
    return;
  }
  panel.append(el("div", "headword", `${entry.headword} (${entry.total})`));
  for (const group of entry.groups) {
    panel.append(el("div", "group-header", `${group.strong ?? "(no core)"} ×${group.count}`));
    for (const occ of group.occurrences) {
      const line = el("div", "kwic", occ.kwic);
      line.addEventListener("click", () => void store.open(occ.verse));
      panel.append(line);
    }
  }
}

export function attachSearch(
  input: HTMLInputElement,
  typeSelect: HTMLSelectElement,
  results: HTMLElement,
  api: ApiClient,
  store: EditorStore,
): void {
  input.addEventListener("keydown", async (event) => {
    if (event.key !== "Enter" || !input.value) return;
    results.textContent = "";
    const hits = await api.search(input.value, typeSelect.value as "lemma" | "surface" | "strong");
    if (!hits.length) {
      results.append(el("div", "empty", "no hits"));
      return;
    }
    for (const hit of hits) {
      const row = el(
        "div",
        "hit",
        `${hit.ref}  ${hit.side === "source" ? hit.token : `row ${hit.position}`}  ${hit.surface}`,
      );
      row.addEventListener("click", () => void store.open(hit.ref));
      results.append(row);
    }
  });
}
