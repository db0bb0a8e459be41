// Thin fetch client for the alignment service.

import type {
  ConcordanceEntry,
  CorpusMeta,
  DiagnosticJson,
  EditOutcome,
  EditSpec,
  Neighbors,
  SearchHit,
  ServiceFailure,
  VersePayload,
} from "./types.js";

export interface ApiClient {
  meta(): Promise<CorpusMeta>;
  verse(ref: string): Promise<VersePayload>;
  neighbors(ref: string): Promise<Neighbors>;
  submitEdits(ref: string, baseRevision: number, session: string, edits: EditSpec[]): Promise<EditOutcome>;
  undo(session: string): Promise<EditOutcome & { ref?: string }>;
  redo(session: string): Promise<EditOutcome & { ref?: string }>;
  validateVerse(ref: string): Promise<DiagnosticJson[]>;
  search(q: string, type: "lemma" | "surface" | "strong"): Promise<SearchHit[]>;
  concordance(headword: string): Promise<ConcordanceEntry | null>;
  save(): Promise<EditOutcome>;
}

async function failureFrom(response: Response): Promise<ServiceFailure> {
  let body: Record<string, unknown> = {};
  try {
    body = (await response.json()) as Record<string, unknown>;
  } catch {
    // non-JSON error body; keep the status
  }
  return {
    ok: false,
    status: response.status,
    code: String(body.code ?? "http_error"),
    message: String(body.message ?? response.statusText),
    rule: body.rule as string | undefined,
    current_revision: body.current_revision as number | undefined,
    diagnostics: body.diagnostics as DiagnosticJson[] | undefined,
  };
}

export class HttpApiClient implements ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) {
      throw await failureFrom(response);
    }
    return (await response.json()) as T;
  }

  meta(): Promise<CorpusMeta> {
    return this.getJson("/corpus/meta");
  }

  verse(ref: string): Promise<VersePayload> {
    return this.getJson(`/verse/${encodeURIComponent(ref)}`);
  }

  neighbors(ref: string): Promise<Neighbors> {
    return this.getJson(`/verse/${encodeURIComponent(ref)}/neighbors`);
  }

  async submitEdits(
    ref: string,
    baseRevision: number,
    session: string,
    edits: EditSpec[],
  ): Promise<EditOutcome> {
    const response = await fetch(`${this.baseUrl}/verse/${encodeURIComponent(ref)}/edits`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ base_revision: baseRevision, session, edits }),
    });
    if (!response.ok) {
      return failureFrom(response);
    }
    const body = (await response.json()) as { revision: number };
    return { ok: true, revision: body.revision };
  }

  private async post(path: string): Promise<EditOutcome & { ref?: string }> {
    const response = await fetch(this.baseUrl + path, { method: "POST" });
    if (!response.ok) {
      return failureFrom(response);
    }
    const body = (await response.json()) as { revision: number; ref?: string };
    return { ok: true, revision: body.revision, ref: body.ref };
  }

  undo(session: string): Promise<EditOutcome & { ref?: string }> {
    return this.post(`/session/${encodeURIComponent(session)}/undo`);
  }

  redo(session: string): Promise<EditOutcome & { ref?: string }> {
    return this.post(`/session/${encodeURIComponent(session)}/redo`);
  }

  async validateVerse(ref: string): Promise<DiagnosticJson[]> {
    const body = await this.getJson<{ diagnostics: DiagnosticJson[] }>(
      `/validate?scope=${encodeURIComponent(ref)}`,
    );
    return body.diagnostics;
  }

  async search(q: string, type: "lemma" | "surface" | "strong"): Promise<SearchHit[]> {
    const body = await this.getJson<{ hits: SearchHit[] }>(
      `/search?q=${encodeURIComponent(q)}&type=${type}`,
    );
    return body.hits;
  }

  async concordance(headword: string): Promise<ConcordanceEntry | null> {
    const response = await fetch(`${this.baseUrl}/concordance/${encodeURIComponent(headword)}`);
    if (response.status === 404) {
      return null;
    }
    if (!response.ok) {
      throw await failureFrom(response);
    }
    return (await response.json()) as ConcordanceEntry;
  }

  async save(): Promise<EditOutcome> {
    const response = await fetch(`${this.baseUrl}/save`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({}),
    });
    if (!response.ok) {
      return failureFrom(response);
    }
    return { ok: true, revision: -1 };
  }
}
