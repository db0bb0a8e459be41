// Editor state: current verse, selection, and the optimistic edit loop.
//
// The store never mutates local state except as a mirror of a batch it
// has just submitted; when the server rejects the batch (revision
// conflict or invariant violation) the store refetches so UI state is
// the server state again.

import { applyEditLocal, applyEditsLocal, cycleEdit } from "./alignment.js";
import type { ApiClient } from "./api.js";
import type { EditSpec, LinkKind, ServiceFailure, VersePayload } from "./types.js";

export interface ViewState {
  ref: string;
  revision: number;
  selectedSource: string | null;
  selectedTargets: number[];
  pendingKind: LinkKind;
  dirty: boolean;
}

export type Listener = (store: EditorStore) => void;

interface ToggleIntent {
  source: string;
  targets: number[];
}

export class EditorStore {
  verse: VersePayload | null = null;
  view: ViewState = {
    ref: "",
    revision: -1,
    selectedSource: null,
    selectedTargets: [],
    pendingKind: "core",
    dirty: false,
  };
  lastError: ServiceFailure | null = null;
  private listeners: Listener[] = [];
  private inFlight = false;
  // Keystrokes arriving while a batch is in flight coalesce here and
  // flush as one batch once the server answers.
  private queuedToggles: ToggleIntent[] = [];

  constructor(
    private readonly api: ApiClient,
    readonly session: string,
  ) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this);
  }

  async open(ref: string): Promise<void> {
    const verse = await this.api.verse(ref);
    this.verse = verse;
    this.view = {
      ...this.view,
      ref: verse.ref,
      revision: verse.revision,
      selectedSource: null,
      selectedTargets: [],
    };
    this.lastError = null;
    this.notify();
  }

  async refetch(): Promise<void> {
    if (this.view.ref) {
      const verse = await this.api.verse(this.view.ref);
      this.verse = verse;
      this.view = { ...this.view, revision: verse.revision };
      this.pruneSelection();
      this.notify();
    }
  }

  private pruneSelection(): void {
    if (!this.verse) return;
    const ids = new Set(this.verse.source.map((t) => t.id));
    if (this.view.selectedSource && !ids.has(this.view.selectedSource)) {
      this.view.selectedSource = null;
    }
    this.view.selectedTargets = this.view.selectedTargets.filter(
      (p) => p >= 0 && p < this.verse!.target.length,
    );
  }

  selectSource(id: string | null): void {
    this.view = { ...this.view, selectedSource: id };
    this.notify();
  }

  toggleTarget(position: number): void {
    const current = new Set(this.view.selectedTargets);
    if (current.has(position)) {
      current.delete(position);
    } else {
      current.add(position);
    }
    this.selectTargets([...current]);
  }

  selectTargets(positions: number[]): void {
    this.view = { ...this.view, selectedTargets: [...positions].sort((a, b) => a - b) };
    this.notify();
  }

  clearSelection(): void {
    this.view = { ...this.view, selectedSource: null, selectedTargets: [] };
    this.notify();
  }

  /** Submit a batch optimistically; roll back to server state on rejection. */
  async submit(edits: EditSpec[]): Promise<boolean> {
    if (!this.verse || !edits.length || this.inFlight) return false;
    const before = this.verse;
    let predicted: VersePayload;
    try {
      predicted = applyEditsLocal(before, edits);
    } catch (error) {
      this.lastError = {
        ok: false,
        status: 0,
        code: "local_rejection",
        message: error instanceof Error ? error.message : String(error),
      };
      this.notify();
      return false;
    }
    this.inFlight = true;
    this.verse = predicted; // optimistic mirror
    this.notify();
    try {
      const outcome = await this.api.submitEdits(this.view.ref, this.view.revision, this.session, edits);
      if (outcome.ok) {
        this.verse = { ...predicted, revision: outcome.revision };
        this.view = { ...this.view, revision: outcome.revision, dirty: true };
        this.lastError = null;
        this.notify();
        return true;
      }
      this.lastError = outcome;
      this.verse = before;
      await this.refetch(); // server state wins
      return false;
    } finally {
      this.inFlight = false;
      await this.flushQueuedToggles();
    }
  }

  private async flushQueuedToggles(): Promise<void> {
    if (!this.queuedToggles.length || this.inFlight || !this.verse) return;
    const queued = this.queuedToggles;
    this.queuedToggles = [];
    // Recompute the cycle against the verse as it stands now; the queue
    // holds intents, not stale edit specs.
    const edits: EditSpec[] = [];
    let preview = this.verse;
    for (const intent of queued) {
      for (const position of intent.targets) {
        const edit = cycleEdit(preview, intent.source, position);
        preview = applyEditLocal(preview, edit);
        edits.push(edit);
      }
    }
    if (edits.length) {
      await this.submit(edits);
    }
  }

  /** Cycle absent -> core -> aux -> absent for the current selection. */
  async toggleLinks(): Promise<boolean> {
    if (!this.verse || !this.view.selectedSource || !this.view.selectedTargets.length) {
      return false;
    }
    const source = this.view.selectedSource;
    if (this.inFlight) {
      this.queuedToggles.push({ source, targets: [...this.view.selectedTargets] });
      return true;
    }
    const edits = this.view.selectedTargets.map((position) => cycleEdit(this.verse!, source, position));
    return this.submit(edits);
  }

  async undo(): Promise<boolean> {
    const outcome = await this.api.undo(this.session);
    if (!outcome.ok) {
      this.lastError = outcome;
      this.notify();
      return false;
    }
    if (outcome.ref && outcome.ref !== this.view.ref) {
      await this.open(outcome.ref);
    } else {
      await this.refetch();
    }
    return true;
  }

  async redo(): Promise<boolean> {
    const outcome = await this.api.redo(this.session);
    if (!outcome.ok) {
      this.lastError = outcome;
      this.notify();
      return false;
    }
    if (outcome.ref && outcome.ref !== this.view.ref) {
      await this.open(outcome.ref);
    } else {
      await this.refetch();
    }
    return true;
  }

  async navigate(direction: "prev" | "next"): Promise<void> {
    const neighbors = await this.api.neighbors(this.view.ref);
    const ref = direction === "prev" ? neighbors.prev : neighbors.next;
    if (ref !== this.view.ref) {
      await this.open(ref);
    }
  }

  async save(): Promise<boolean> {
    const outcome = await this.api.save();
    if (!outcome.ok) {
      this.lastError = outcome;
      this.notify();
      return false;
    }
    this.view = { ...this.view, dirty: false };
    this.notify();
    return true;
  }
}
