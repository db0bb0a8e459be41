// Pure alignment logic shared by rendering, editing, and tests:
// group computation over core links, the absent -> core -> aux -> absent
// link cycle, and a local mirror of the server's edit semantics for
// optimistic updates.

import type { EditSpec, LinkKind, TargetRowJson, VersePayload } from "./types.js";

export function tokenOrder(id: string): [number, string] {
  const match = /^(\d+)([a-z]?)$/.exec(id);
  if (!match) {
    return [Number.MAX_SAFE_INTEGER, id];
  }
  return [Number(match[1]), match[2]];
}

export function compareTokenIds(a: string, b: string): number {
  const [wa, sa] = tokenOrder(a);
  const [wb, sb] = tokenOrder(b);
  if (wa !== wb) return wa - wb;
  return sa < sb ? -1 : sa > sb ? 1 : 0;
}

export interface Groups {
  // Group key = the smallest source token ID in the component.
  bySource: Map<string, string>;
  byTarget: Map<number, string>;
}

/** Connected components of the bipartite core-link graph. */
export function computeGroups(verse: VersePayload): Groups {
  const sourceToTargets = new Map<string, number[]>();
  const targetToSources = new Map<number, string[]>();
  for (const row of verse.target) {
    for (const link of row.links ?? []) {
      if (link.kind !== "core" || link.verse_offset !== 0) continue;
      sourceToTargets.set(link.target, [...(sourceToTargets.get(link.target) ?? []), row.position]);
      targetToSources.set(row.position, [...(targetToSources.get(row.position) ?? []), link.target]);
    }
  }
  const bySource = new Map<string, string>();
  const byTarget = new Map<number, string>();
  for (const start of sourceToTargets.keys()) {
    if (bySource.has(start)) continue;
    const sources = new Set<string>();
    const targets = new Set<number>();
    const queue: Array<{ side: "s" | "t"; value: string | number }> = [{ side: "s", value: start }];
    while (queue.length) {
      const node = queue.pop()!;
      if (node.side === "s") {
        const id = node.value as string;
        if (sources.has(id)) continue;
        sources.add(id);
        for (const position of sourceToTargets.get(id) ?? []) {
          queue.push({ side: "t", value: position });
        }
      } else {
        const position = node.value as number;
        if (targets.has(position)) continue;
        targets.add(position);
        for (const id of targetToSources.get(position) ?? []) {
          queue.push({ side: "s", value: id });
        }
      }
    }
    const key = [...sources].sort(compareTokenIds)[0];
    for (const id of sources) bySource.set(id, key);
    for (const position of targets) byTarget.set(position, key);
  }
  return { bySource, byTarget };
}

export type LinkState = "absent" | LinkKind;

export function linkState(verse: VersePayload, sourceId: string, position: number): LinkState {
  const row = verse.target[position];
  if (!row || !row.links) return "absent";
  const hit = row.links.find((l) => l.target === sourceId && l.verse_offset === 0);
  return hit ? hit.kind : "absent";
}

/** One step of the cycle absent -> core -> aux -> absent for a pair. */
export function cycleEdit(verse: VersePayload, sourceId: string, position: number): EditSpec {
  const state = linkState(verse, sourceId, position);
  if (state === "absent") {
    return { op: "add_link", position, token: sourceId, kind: "core" };
  }
  if (state === "core") {
    return { op: "set_link_kind", position, token: sourceId, kind: "aux" };
  }
  return { op: "remove_link", position, token: sourceId };
}

/** Mirror of the server's edit semantics, for optimistic UI updates. */
export function applyEditLocal(verse: VersePayload, edit: EditSpec): VersePayload {
  const target = verse.target.map((row) => ({ ...row, links: row.links ? [...row.links] : null }));
  const row = target[edit.position];
  if (!row) {
    throw new Error(`no target row ${edit.position}`);
  }
  const offset = edit.verse_offset ?? 0;
  switch (edit.op) {
    case "add_link": {
      const links = row.links ?? [];
      if (links.some((l) => l.target === edit.token && l.verse_offset === offset)) {
        throw new Error(`row ${edit.position} already links ${edit.token}`);
      }
      const at = edit.index == null ? links.length : Math.min(Math.max(edit.index, 0), links.length);
      links.splice(at, 0, { target: edit.token!, kind: edit.kind ?? "core", verse_offset: offset });
      row.links = links;
      break;
    }
    case "remove_link": {
      const links = row.links ?? [];
      const at = links.findIndex((l) => l.target === edit.token && l.verse_offset === offset);
      if (at < 0) {
        throw new Error(`row ${edit.position} has no link to ${edit.token}`);
      }
      links.splice(at, 1);
      row.links = links.length ? links : null;
      break;
    }
    case "set_link_kind": {
      const hit = (row.links ?? []).find((l) => l.target === edit.token && l.verse_offset === offset);
      if (!hit) {
        throw new Error(`row ${edit.position} has no link to ${edit.token}`);
      }
      hit.kind = edit.kind ?? "core";
      break;
    }
    case "set_target_lemma": {
      row.lemma = { ...edit.lemma! };
      break;
    }
    case "set_no_source": {
      row.links = null;
      break;
    }
  }
  return { ...verse, target };
}

export function applyEditsLocal(verse: VersePayload, edits: EditSpec[]): VersePayload {
  return edits.reduce(applyEditLocal, verse);
}

export function detokenize(verse: VersePayload): string {
  let out = "";
  for (const row of verse.target) {
    if (row.lemma.kind === "extractor") continue;
    out += row.surface + (row.trailing_space ? " " : "");
  }
  return out;
}

/** Extractor rows grouped under the source token they attach to. */
export function extractorBadges(verse: VersePayload): Map<string, TargetRowJson[]> {
  const badges = new Map<string, TargetRowJson[]>();
  for (const row of verse.target) {
    if (row.lemma.kind !== "extractor") continue;
    for (const link of row.links ?? []) {
      if (link.verse_offset !== 0) continue;
      badges.set(link.target, [...(badges.get(link.target) ?? []), row]);
    }
  }
  return badges;
}

export function versesEqual(a: VersePayload, b: VersePayload): boolean {
  return JSON.stringify({ ...a, revision: 0 }) === JSON.stringify({ ...b, revision: 0 });
}
