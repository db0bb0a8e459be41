// DOM rendering of the two synchronized panes.
//
// Every alignment group gets a stable color; aux links render dashed,
// no-source rows muted, extractor rows as badges pinned to the source
// token they attach to. The source pane flips to right-to-left when
// the surface script is Hebrew.

import { computeGroups, extractorBadges, linkState } from "./alignment.js";
import { borderColorForGroup, colorForGroup } from "./colors.js";
import type { EditorStore } from "./state.js";

const HEBREW = /[֐-׿]/;

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderVerse(
  sourcePane: HTMLElement,
  targetPane: HTMLElement,
  store: EditorStore,
): void {
  const verse = store.verse;
  sourcePane.textContent = "";
  targetPane.textContent = "";
  if (!verse) return;

  const groups = computeGroups(verse);
  const badges = extractorBadges(verse);
  const selectedSource = store.view.selectedSource;
  const selectedTargets = new Set(store.view.selectedTargets);

  sourcePane.dir = verse.source.some((t) => HEBREW.test(t.surface)) ? "rtl" : "ltr";

  for (const token of verse.source) {
    const group = groups.bySource.get(token.id);
    const cell = el("button", "token source-token");
    cell.dataset.id = token.id;
    if (group) {
      cell.style.background = colorForGroup(group);
      cell.style.borderColor = borderColorForGroup(group);
    }
    if (token.id === selectedSource) cell.classList.add("selected");
    cell.append(el("span", "token-id", token.id));
    cell.append(el("span", "surface", token.surface));
    const strong = token.lemma.strong;
    cell.append(el("span", "lemma-code", strong ?? token.lemma.lemma ?? ""));
    for (const badge of badges.get(token.id) ?? []) {
      const chip = el("span", "extractor-badge", `%${badge.lemma.value}`);
      const kind = linkState(verse, token.id, badge.position);
      if (kind === "aux") chip.classList.add("aux");
      cell.append(chip);
    }
    cell.addEventListener("click", () => {
      store.selectSource(token.id === store.view.selectedSource ? null : token.id);
    });
    sourcePane.append(cell);
  }

  for (const row of verse.target) {
    if (row.lemma.kind === "extractor") continue; // shown as source badges
    const group = groups.byTarget.get(row.position);
    const cell = el("button", "token target-token");
    cell.dataset.position = String(row.position);
    if (row.links === null) cell.classList.add("nosource");
    if (group) {
      cell.style.background = colorForGroup(group);
      cell.style.borderColor = borderColorForGroup(group);
    }
    if (selectedTargets.has(row.position)) cell.classList.add("selected");
    if (selectedSource && linkState(verse, selectedSource, row.position) === "aux") {
      cell.classList.add("aux");
    }
    cell.append(el("span", "surface", row.surface || "∅"));
    const linkText = (row.links ?? [])
      .map((l) => (l.kind === "aux" ? `(${l.target})` : l.target))
      .join(" ");
    cell.append(el("span", "links", row.links === null ? "-" : linkText));
    cell.addEventListener("click", () => store.toggleTarget(row.position));
    targetPane.append(cell);
  }
}

export function renderStatus(bar: HTMLElement, store: EditorStore): void {
  const parts = [store.view.ref, `rev ${store.view.revision}`];
  if (store.view.dirty) parts.push("unsaved changes");
  if (store.lastError) {
    parts.push(`${store.lastError.code}: ${store.lastError.message}`);
    bar.classList.add("error");
  } else {
    bar.classList.remove("error");
  }
  bar.textContent = parts.join("  •  ");
}
