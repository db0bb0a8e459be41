import { HttpApiClient } from "./api.js";
import { attachKeyboard } from "./keys.js";
import { attachSearch, renderConcordancePanel, renderValidationPanel } from "./panels.js";
import { renderStatus, renderVerse } from "./render.js";
import { EditorStore } from "./state.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const api = new HttpApiClient("");
  const session = `ui-${Math.random().toString(36).slice(2, 10)}`;
  const store = new EditorStore(api, session);

  const sourcePane = byId<HTMLElement>("source-pane");
  const targetPane = byId<HTMLElement>("target-pane");
  const statusBar = byId<HTMLElement>("status-bar");
  const validationPanel = byId<HTMLElement>("validation-panel");
  const concordancePanel = byId<HTMLElement>("concordance-panel");

  store.subscribe(() => {
    renderVerse(sourcePane, targetPane, store);
    renderStatus(statusBar, store);
    void renderValidationPanel(validationPanel, api, store);
    void renderConcordancePanel(concordancePanel, api, store);
  });

  byId<HTMLButtonElement>("prev-btn").addEventListener("click", () => void store.navigate("prev"));
  byId<HTMLButtonElement>("next-btn").addEventListener("click", () => void store.navigate("next"));
  byId<HTMLButtonElement>("toggle-btn").addEventListener("click", () => void store.toggleLinks());
  byId<HTMLButtonElement>("undo-btn").addEventListener("click", () => void store.undo());
  byId<HTMLButtonElement>("redo-btn").addEventListener("click", () => void store.redo());
  byId<HTMLButtonElement>("save-btn").addEventListener("click", () => void store.save());
  attachSearch(
    byId<HTMLInputElement>("search-input"),
    byId<HTMLSelectElement>("search-type"),
    byId<HTMLElement>("search-results"),
    api,
    store,
  );
  attachKeyboard(store);

  const meta = await api.meta();
  byId<HTMLElement>("corpus-label").textContent =
    `${meta.label || "corpus"} — ${meta.verse_count} verses, ${meta.books.length} books`;
  if (meta.first_ref) {
    await store.open(meta.first_ref);
  }
}

void boot();
