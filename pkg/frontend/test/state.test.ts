import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { applyEditsLocal, linkState, versesEqual } from "../src/alignment.js";
import type { ApiClient } from "../src/api.js";
import { EditorStore } from "../src/state.js";
import type {
  ConcordanceEntry,
  CorpusMeta,
  DiagnosticJson,
  EditOutcome,
  EditSpec,
  Neighbors,
  SearchHit,
  VersePayload,
} from "../src/types.js";

const baseVerse: VersePayload = JSON.parse(
  readFileSync(join(__dirname, "hb001.json"), "utf-8"),
);

type SubmitBehavior = "accept" | "conflict" | "invariant";

/** In-memory fake of the service, mirroring its edit semantics. */
class FakeApi implements ApiClient {
  verseState: VersePayload = structuredClone(baseVerse);
  revision = 0;
  behavior: SubmitBehavior = "accept";
  submitted: EditSpec[][] = [];

  async meta(): Promise<CorpusMeta> {
    return {
      label: "fake",
      books: ["hb"],
      verse_count: 1,
      extractors: [],
      revision: this.revision,
      first_ref: this.verseState.ref,
      last_ref: this.verseState.ref,
    };
  }

  async verse(): Promise<VersePayload> {
    return { ...structuredClone(this.verseState), revision: this.revision };
  }

  async neighbors(): Promise<Neighbors> {
    return { prev: this.verseState.ref, next: this.verseState.ref };
  }

  async submitEdits(
    _ref: string,
    baseRevision: number,
    _session: string,
    edits: EditSpec[],
  ): Promise<EditOutcome> {
    this.submitted.push(edits);
    if (this.behavior === "conflict" || baseRevision !== this.revision) {
      return {
        ok: false,
        status: 409,
        code: "revision_conflict",
        message: "stale base revision",
        current_revision: this.revision,
      };
    }
    if (this.behavior === "invariant") {
      return {
        ok: false,
        status: 422,
        code: "invariant_violation",
        message: "links must resolve",
        rule: "R1-dangling-link",
      };
    }
    this.verseState = applyEditsLocal(this.verseState, edits);
    this.revision += 1;
    return { ok: true, revision: this.revision };
  }

  async undo(): Promise<EditOutcome & { ref?: string }> {
    return { ok: true, revision: ++this.revision, ref: this.verseState.ref };
  }

  async redo(): Promise<EditOutcome & { ref?: string }> {
    return { ok: true, revision: ++this.revision, ref: this.verseState.ref };
  }

  async validateVerse(): Promise<DiagnosticJson[]> {
    return [];
  }

  async search(): Promise<SearchHit[]> {
    return [];
  }

  async concordance(): Promise<ConcordanceEntry | null> {
    return null;
  }

  async save(): Promise<EditOutcome> {
    return { ok: true, revision: this.revision };
  }
}

function jumalaPosition(): number {
  return baseVerse.target.find((r) => r.surface === "Jumala")!.position;
}

describe("optimistic editing", () => {
  it("keeps the optimistic state when the server accepts", async () => {
    const api = new FakeApi();
    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    const ok = await store.submit([
      { op: "remove_link", position: jumalaPosition(), token: "5" },
    ]);
    expect(ok).toBe(true);
    expect(store.view.revision).toBe(1);
    expect(store.view.dirty).toBe(true);
    expect(linkState(store.verse!, "5", jumalaPosition())).toBe("absent");
    expect(versesEqual(store.verse!, api.verseState)).toBe(true);
  });

  it("rolls back to server state on a revision conflict", async () => {
    const api = new FakeApi();
    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    api.behavior = "conflict";
    const ok = await store.submit([
      { op: "remove_link", position: jumalaPosition(), token: "5" },
    ]);
    expect(ok).toBe(false);
    expect(store.lastError?.code).toBe("revision_conflict");
    // After the rejection the UI state equals the server state.
    expect(versesEqual(store.verse!, api.verseState)).toBe(true);
    expect(linkState(store.verse!, "5", jumalaPosition())).toBe("aux");
  });

  it("rolls back on an invariant violation and surfaces the rule", async () => {
    const api = new FakeApi();
    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    api.behavior = "invariant";
    const ok = await store.submit([
      { op: "add_link", position: jumalaPosition(), token: "4" },
    ]);
    expect(ok).toBe(false);
    expect(store.lastError?.rule).toBe("R1-dangling-link");
    expect(versesEqual(store.verse!, api.verseState)).toBe(true);
  });

  it("rejects locally impossible edits without calling the server", async () => {
    const api = new FakeApi();
    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    const ok = await store.submit([
      { op: "remove_link", position: jumalaPosition(), token: "1" },
    ]);
    expect(ok).toBe(false);
    expect(store.lastError?.code).toBe("local_rejection");
    expect(api.submitted.length).toBe(0);
    expect(versesEqual(store.verse!, api.verseState)).toBe(true);
  });
});

describe("selection-driven cycling", () => {
  it("builds one cycle edit per selected target row", async () => {
    const api = new FakeApi();
    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    const monella = baseVerse.target.find((r) => r.surface === "monella")!.position;
    const tapaa = baseVerse.target.find((r) => r.surface === "tapaa")!.position;
    store.selectSource("3");
    store.toggleTarget(monella);
    store.toggleTarget(tapaa);
    const ok = await store.toggleLinks();
    expect(ok).toBe(true);
    expect(api.submitted[0]).toEqual([
      { op: "set_link_kind", position: monella, token: "3", kind: "aux" },
      { op: "set_link_kind", position: tapaa, token: "3", kind: "aux" },
    ]);
  });

  it("three cycles return the verse to its original state", async () => {
    const api = new FakeApi();
    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    const muinoin = baseVerse.target.find((r) => r.surface === "muinoin")!.position;
    store.selectSource("2");
    store.toggleTarget(muinoin);
    await store.toggleLinks(); // absent -> core
    await store.toggleLinks(); // core -> aux
    await store.toggleLinks(); // aux -> absent
    expect(versesEqual(store.verse!, baseVerse)).toBe(true);
    expect(store.view.revision).toBe(3);
  });

  it("prunes selection when the verse changes", async () => {
    const api = new FakeApi();
    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    store.selectSource("7");
    store.toggleTarget(2);
    await store.refetch();
    expect(store.view.selectedSource).toBe("7");
    expect(store.view.selectedTargets).toEqual([2]);
  });
});

describe("keystroke coalescing", () => {
  it("toggles arriving mid-flight flush as one follow-up batch", async () => {
    const api = new FakeApi();
    let release!: () => void;
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    const realSubmit = api.submitEdits.bind(api);
    let calls = 0;
    api.submitEdits = async (ref, baseRevision, session, edits) => {
      calls += 1;
      if (calls === 1) await gate;
      return realSubmit(ref, baseRevision, session, edits);
    };

    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    const muinoin = baseVerse.target.find((r) => r.surface === "muinoin")!.position;
    store.selectSource("2");
    store.toggleTarget(muinoin);

    const first = store.toggleLinks(); // blocks on the gate
    await Promise.resolve();
    const second = store.toggleLinks(); // coalesces
    const third = store.toggleLinks(); // coalesces too
    release();
    await Promise.all([first, second, third]);
    await new Promise((r) => setTimeout(r, 0));

    // absent -> core (first batch), then core -> aux -> absent coalesced.
    expect(calls).toBe(2);
    expect(api.submitted[1]).toEqual([
      { op: "set_link_kind", position: muinoin, token: "2", kind: "aux" },
      { op: "remove_link", position: muinoin, token: "2" },
    ]);
    expect(linkState(store.verse!, "2", muinoin)).toBe("absent");
    expect(versesEqual(store.verse!, api.verseState)).toBe(true);
  });
});

describe("undo and save", () => {
  it("refetches after undo", async () => {
    const api = new FakeApi();
    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    await store.submit([{ op: "remove_link", position: jumalaPosition(), token: "5" }]);
    api.verseState = structuredClone(baseVerse); // pretend the server undid it
    await store.undo();
    expect(versesEqual(store.verse!, baseVerse)).toBe(true);
  });

  it("save clears the dirty flag", async () => {
    const api = new FakeApi();
    const store = new EditorStore(api, "t");
    await store.open("hb001:001");
    await store.submit([{ op: "remove_link", position: jumalaPosition(), token: "5" }]);
    expect(store.view.dirty).toBe(true);
    await store.save();
    expect(store.view.dirty).toBe(false);
  });
});
