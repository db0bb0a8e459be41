// Keyboard-driven editing: all annotator actions are reachable without
// the mouse. Arrows move the token selection, PageUp/PageDown change
// verses (with an unsaved-changes guard), Enter cycles the link kind.

import { compareTokenIds } from "./alignment.js";
import type { EditorStore } from "./state.js";

function moveSource(store: EditorStore, delta: number): void {
  const verse = store.verse;
  if (!verse || !verse.source.length) return;
  const ids = verse.source.map((t) => t.id).sort(compareTokenIds);
  const current = store.view.selectedSource;
  const index = current ? ids.indexOf(current) : -1;
  const next = Math.min(Math.max(index + delta, 0), ids.length - 1);
  store.selectSource(ids[next]);
}

function moveTarget(store: EditorStore, delta: number): void {
  const verse = store.verse;
  if (!verse || !verse.target.length) return;
  const selectable = verse.target.filter((r) => r.lemma.kind !== "extractor").map((r) => r.position);
  if (!selectable.length) return;
  const last = store.view.selectedTargets[store.view.selectedTargets.length - 1];
  const index = last === undefined ? -1 : selectable.indexOf(last);
  const next = selectable[Math.min(Math.max(index + delta, 0), selectable.length - 1)];
  store.selectTargets([next]);
}

async function guardedNavigate(store: EditorStore, direction: "prev" | "next"): Promise<void> {
  if (store.view.dirty && !window.confirm("Unsaved changes; leave this verse anyway?")) {
    return;
  }
  await store.navigate(direction);
}

export function attachKeyboard(store: EditorStore): void {
  document.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement) return;
    switch (event.key) {
      case "ArrowLeft":
        moveSource(store, -1);
        break;
      case "ArrowRight":
        moveSource(store, 1);
        break;
      case "ArrowUp":
        moveTarget(store, -1);
        break;
      case "ArrowDown":
        moveTarget(store, 1);
        break;
      case "Enter":
      case " ":
        void store.toggleLinks();
        break;
      case "PageUp":
        void guardedNavigate(store, "prev");
        break;
      case "PageDown":
        void guardedNavigate(store, "next");
        break;
      case "z":
        if (event.ctrlKey || event.metaKey) void store.undo();
        else return;
        break;
      case "y":
        if (event.ctrlKey || event.metaKey) void store.redo();
        else return;
        break;
      case "s":
        if (event.ctrlKey || event.metaKey) void store.save();
        else return;
        break;
      case "Escape":
        store.clearSelection();
        break;
      default:
        return;
    }
    event.preventDefault();
  });
}
