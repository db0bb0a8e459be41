"""Analytical concordance: headwords with source lemma numbers and
keyword-in-context lines.

Headwords are the plain target lemmas only. Parenthesized periphery
lemmas go to a separate appendix, extractor rows are morphosyntactic
links rather than words, and dash rows have nothing to index. Each
occurrence carries the source lemma numbers its links resolve to; the
core link defines the grouping, aux links are displayed but never
group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .model import (
    Corpus,
    LinkKind,
    StrongCode,
    VerseAlignment,
    VerseRef,
    iter_verses,
    resolve_links,
)


@dataclass(frozen=True)
class Occurrence:
    """One plain-lemma target row, ready for concordance display."""

    ref: VerseRef
    position: int
    headword: str
    strongs: tuple[tuple[StrongCode, LinkKind], ...]
    context: str
    start: int
    end: int

    @property
    def keyword(self) -> str:
        return self.context[self.start : self.end]

    def primary_core(self) -> Optional[StrongCode]:
        for code, kind in self.strongs:
            if kind == "core":
                return code
        return None


@dataclass(frozen=True)
class StrongGroup:
    strong: Optional[StrongCode]
    occurrences: tuple[Occurrence, ...]

    @property
    def count(self) -> int:
        return len(self.occurrences)


@dataclass(frozen=True)
class HeadwordEntry:
    headword: str
    groups: tuple[StrongGroup, ...]

    @property
    def total(self) -> int:
        return sum(g.count for g in self.groups)


def _target_spans(verse: VerseAlignment) -> dict[int, tuple[int, int]]:
    """Character span of each non-extractor row in the detokenized text."""
    spans: dict[int, tuple[int, int]] = {}
    offset = 0
    for row in verse.target:
        if row.is_extractor:
            continue
        spans[row.position] = (offset, offset + len(row.surface))
        offset += len(row.surface) + (1 if row.trailing_space else 0)
    return spans


def build_index(corpus: Corpus) -> dict[str, list[Occurrence]]:
    """One occurrence per plain-lemma target row, in canonical verse order.

    Propagates :class:`~helfi_align.model.DanglingLink`; run the
    validator first if the corpus may contain unresolved links.
    """
    index: dict[str, list[Occurrence]] = {}
    for verse in iter_verses(corpus):
        hits_by_position: dict[int, list] = {}
        for hit in resolve_links(verse):
            hits_by_position.setdefault(hit.position, []).append(hit)
        spans = _target_spans(verse)
        context_parts: list[str] = []
        for row in verse.target:
            if row.is_extractor:
                continue
            context_parts.append(row.surface + (" " if row.trailing_space else ""))
        context = "".join(context_parts)
        for row in verse.target:
            if row.lemma.kind != "plain":
                continue
            strongs = tuple(
                (hit.token.lemma.strong, hit.kind)
                for hit in hits_by_position.get(row.position, ())
                if hit.token.lemma.strong is not None
            )
            start, end = spans[row.position]
            index.setdefault(row.lemma.value, []).append(
                Occurrence(
                    ref=verse.ref,
                    position=row.position,
                    headword=row.lemma.value,
                    strongs=strongs,
                    context=context,
                    start=start,
                    end=end,
                )
            )
    return index


def periphery_appendix(corpus: Corpus) -> dict[str, list[tuple[VerseRef, int]]]:
    """Parenthesized lemmas, indexed separately from the main concordance."""
    appendix: dict[str, list[tuple[VerseRef, int]]] = {}
    for verse in iter_verses(corpus):
        for row in verse.target:
            if row.lemma.kind == "periphery":
                appendix.setdefault(row.lemma.value, []).append((verse.ref, row.position))
    return appendix


def total_occurrences(index: dict[str, list[Occurrence]]) -> int:
    return sum(len(v) for v in index.values())


def kwic_window(occ: Occurrence, width: int, markers: tuple[str, str] = ("[", "]")) -> str:
    """The clipped context window alone, at most ``width`` characters.

    The keyword's first character sits on the center column (ties to
    the left). When context runs out on the left the window is padded
    with spaces so the center column holds; when the marked keyword
    would not fit to the right of the center it slides left just enough
    to fit whole.
    """
    open_m, close_m = markers
    keyword_len = occ.end - occ.start
    if width < keyword_len + len(open_m) + len(close_m):
        raise ValueError(f"width {width} cannot fit the marked keyword {occ.keyword!r}")
    center = (width - 1) // 2
    # Column of the keyword's first character; clamp so keyword+markers fit.
    col = min(center, width - keyword_len - len(close_m))
    col = max(col, len(open_m))

    left_budget = col
    left_text = occ.context[: occ.start]
    left = (left_text + open_m)[-left_budget:]
    left = " " * (left_budget - len(left)) + left

    right_budget = width - col - keyword_len
    right = (close_m + occ.context[occ.end :])[:right_budget]
    return f"{left}{occ.keyword}{right}"


def kwic_line(
    occ: Occurrence,
    width: int,
    markers: tuple[str, str] = ("[", "]"),
    separator: str = "  ",
) -> str:
    """Verse reference plus the keyword-in-context window."""
    return f"{occ.ref.render()}{separator}{kwic_window(occ, width, markers)}"


def headword_entries(
    index: dict[str, list[Occurrence]],
    collation=None,
) -> list[HeadwordEntry]:
    """Entries in codepoint order (or a custom collation key), groups by
    descending count then lemma number."""
    entries: list[HeadwordEntry] = []
    for headword in sorted(index, key=collation):
        by_code: dict[Optional[str], list[Occurrence]] = {}
        codes: dict[Optional[str], Optional[StrongCode]] = {}
        for occ in index[headword]:
            code = occ.primary_core()
            key = code.render() if code is not None else None
            by_code.setdefault(key, []).append(occ)
            codes[key] = code
        groups = [StrongGroup(strong=codes[key], occurrences=tuple(occs)) for key, occs in by_code.items()]
        groups.sort(
            key=lambda g: (
                -g.count,
                g.strong is None,  # the no-core bucket comes last
                g.strong.sort_key() if g.strong else (),
            )
        )
        entries.append(HeadwordEntry(headword=headword, groups=tuple(groups)))
    return entries


@dataclass(frozen=True)
class ConcordanceLayout:
    kwic_width: int = 72
    markers: tuple[str, ...] = ("[", "]")
    group_indent: str = "  "
    line_indent: str = "    "


def render_printable(
    entries: Sequence[HeadwordEntry],
    layout: ConcordanceLayout = ConcordanceLayout(),
    appendix: Optional[dict[str, list[tuple[VerseRef, int]]]] = None,
) -> str:
    """Plain-text concordance: headword, per-group lemma-number header,
    then one KWIC line per occurrence."""
    lines: list[str] = []
    for entry in entries:
        lines.append(entry.headword)
        for group in entry.groups:
            header = group.strong.render() if group.strong else "(no core)"
            lines.append(f"{layout.group_indent}{header} ({group.count})")
            for occ in group.occurrences:
                lines.append(layout.line_indent + kwic_line(occ, layout.kwic_width, tuple(layout.markers[:2])))
    if appendix:
        lines.append("")
        lines.append("periphery appendix")
        for lemma in sorted(appendix):
            places = " ".join(f"{ref.render()}:{pos}" for ref, pos in appendix[lemma])
            lines.append(f"{layout.group_indent}({lemma})  {places}")
    return "\n".join(lines) + ("\n" if lines else "")


def render_tsv(entries: Sequence[HeadwordEntry], layout: ConcordanceLayout = ConcordanceLayout()) -> str:
    """TSV rows: headword, lemma number, verse, KWIC window."""
    rows = []
    for entry in entries:
        for group in entry.groups:
            code = group.strong.render() if group.strong else "-"
            for occ in group.occurrences:
                window = kwic_window(occ, layout.kwic_width, tuple(layout.markers[:2]))
                rows.append(f"{entry.headword}\t{code}\t{occ.ref.render()}\t{window}\n")
    return "".join(rows)


def render_json(
    entries: Sequence[HeadwordEntry],
    appendix: Optional[dict[str, list[tuple[VerseRef, int]]]] = None,
) -> str:
    tree = {
        "headwords": [
            {
                "headword": entry.headword,
                "total": entry.total,
                "groups": [
                    {
                        "strong": group.strong.render() if group.strong else None,
                        "count": group.count,
                        "occurrences": [
                            {
                                "verse": occ.ref.render(),
                                "position": occ.position,
                                "strongs": [[code.render(), kind] for code, kind in occ.strongs],
                                "keyword": occ.keyword,
                            }
                            for occ in group.occurrences
                        ],
                    }
                    for group in entry.groups
                ],
            }
            for entry in entries
        ],
    }
    if appendix is not None:
        tree["periphery"] = {
            lemma: [[ref.render(), pos] for ref, pos in places] for lemma, places in sorted(appendix.items())
        }
    return json.dumps(tree, ensure_ascii=False, indent=2) + "\n"
