// JSON payloads of the alignment service; field names mirror the server model.

export type LinkKind = "core" | "aux";

export interface LinkJson {
  target: string;
  kind: LinkKind;
  verse_offset: number;
}

export interface SourceLemmaJson {
  lemma: string | null;
  strong: string | null;
  concord: number | null;
}

export interface SourceTokenJson {
  id: string;
  lemma: SourceLemmaJson;
  morph: string;
  surface: string;
  translit: string;
}

export type TargetLemmaKind = "plain" | "periphery" | "extractor" | "none";

export interface TargetLemmaJson {
  kind: TargetLemmaKind;
  value: string;
}

export interface TargetRowJson {
  position: number;
  links: LinkJson[] | null; // null = no source support (epsilon row)
  lemma: TargetLemmaJson;
  morph: string;
  surface: string;
  trailing_space: boolean;
}

export interface VersePayload {
  ref: string;
  revision: number;
  source: SourceTokenJson[];
  target: TargetRowJson[];
}

export interface CorpusMeta {
  label: string;
  books: string[];
  verse_count: number;
  extractors: string[];
  revision: number;
  first_ref: string | null;
  last_ref: string | null;
}

export interface Neighbors {
  prev: string;
  next: string;
}

export interface DiagnosticJson {
  severity: "error" | "warning";
  rule: string;
  message: string;
  ref: string | null;
  line: number;
}

export interface EditSpec {
  op: "add_link" | "remove_link" | "set_link_kind" | "set_target_lemma" | "set_no_source";
  position: number;
  token?: string;
  kind?: LinkKind;
  lemma?: TargetLemmaJson;
  index?: number | null;
  verse_offset?: number;
}

export interface SearchHit {
  ref: string;
  side: "source" | "target";
  token?: string;
  position?: number;
  surface: string;
}

export interface ConcordanceOccurrence {
  verse: string;
  position: number;
  strongs: [string, LinkKind][];
  kwic: string;
}

export interface ConcordanceGroup {
  strong: string | null;
  count: number;
  occurrences: ConcordanceOccurrence[];
}

export interface ConcordanceEntry {
  headword: string;
  total: number;
  groups: ConcordanceGroup[];
}

export interface ServiceFailure {
  ok: false;
  status: number;
  code: string;
  message: string;
  rule?: string;
  current_revision?: number;
  diagnostics?: DiagnosticJson[];
}

export interface EditSuccess {
  ok: true;
  revision: number;
}

export type EditOutcome = EditSuccess | ServiceFailure;
