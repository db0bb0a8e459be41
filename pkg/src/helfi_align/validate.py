"""Machine-checkable enforcement of the alignment guidelines.

Verse-scope rules R1-R7 look at one verse at a time; corpus-scope rules
C1-C4 need the whole collection (duplicate blocks, book order,
cross-verse link resolution). Diagnostics are data, never exceptions:
the same corpus always yields the same ordered diagnostic list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .formats import Diagnostic, _check_source_order
from .model import Corpus, CoverageStats, TokenId, VerseAlignment, coverage_stats
from .rules import RULES


@dataclass(frozen=True)
class ValidationConfig:
    """Enabled rules, severity overrides, and inventories."""

    severity: dict[str, str] = field(default_factory=dict)  # rule id -> error|warning|off
    morph_inventory: Optional[frozenset[str]] = None
    extractors: Optional[tuple[str, ...]] = None
    # Links made by %pro extractor rows assert reference, not translation,
    # so by default they do not count as coverage for R7.
    pro_links_cover: bool = False

    def severity_of(self, rule_id: str) -> Optional[str]:
        chosen = self.severity.get(rule_id, RULES[rule_id].severity)
        return None if chosen == "off" else chosen


DEFAULT_CONFIG = ValidationConfig()


def load_rule_config(path: str | Path) -> ValidationConfig:
    """Read a key=value rule file: ``R4=error``, ``R7=off``, ``pro-coverage=on``."""
    severity: dict[str, str] = {}
    pro_cover = False
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad rule config line {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "pro-coverage":
            pro_cover = value.lower() in ("1", "true", "yes", "on")
            continue
        if key not in RULES:
            raise ValueError(f"unknown rule id {key!r}")
        if value not in ("error", "warning", "off"):
            raise ValueError(f"bad severity {value!r} for {key}")
        severity[key] = value
    return ValidationConfig(severity=severity, pro_links_cover=pro_cover)


def _diag(config: ValidationConfig, rule_id: str, verse: VerseAlignment, message: str) -> Optional[Diagnostic]:
    severity = config.severity_of(rule_id)
    if severity is None:
        return None
    return Diagnostic(severity=severity, rule=rule_id, message=message, ref=verse.ref)


def validate_verse(
    verse: VerseAlignment,
    config: ValidationConfig = DEFAULT_CONFIG,
    extractors: Sequence[str] = (),
) -> list[Diagnostic]:
    """Apply the verse-scope rules, in rule order, rows in row order."""
    out: list[Diagnostic] = []

    def emit(rule_id: str, message: str) -> None:
        d = _diag(config, rule_id, verse, message)
        if d is not None:
            out.append(d)

    source_ids = verse.source_ids()
    known_extractors = tuple(config.extractors or extractors)

    # R1: every verse-local link resolves.
    for row in verse.target:
        for ref in row.links.refs or ():
            if ref.verse_offset == 0 and ref.target not in source_ids:
                emit("R1-dangling-link", f"target row {row.position} links to missing source token {ref.target.render()}")

    # R2: source ID sequence well-formed.
    for problem in _check_source_order(verse.source):
        emit("R2-token-order", problem)

    # R3: extractor rows attach to source IDs and use a known kind.
    for row in verse.target:
        if not row.is_extractor:
            continue
        if row.links.is_no_source:
            emit("R3-extractor-links", f"extractor row {row.position} (%{row.lemma.value}) has no links")
        if known_extractors and row.lemma.value not in known_extractors:
            emit("R3-extractor-links", f"extractor row {row.position} uses unknown kind %{row.lemma.value}")

    # R4: epsilon rows are parenthesized (or dash); a plain lemma there
    # is suspicious but tolerated, hence the default warning severity.
    for row in verse.target:
        if row.links.is_no_source and row.lemma.kind == "plain":
            emit("R4-nosource-lemma", f"row {row.position} has no source support but a plain lemma {row.lemma.value!r}")

    # R5: morphology atoms from the configured inventory.
    if config.morph_inventory is not None:
        for row in verse.source:
            unknown = [a for a in row.morph.tags if a not in config.morph_inventory]
            if unknown:
                emit("R5-morph-inventory", f"source token {row.id.render()} has unknown morph atoms {unknown}")
        for row in verse.target:
            unknown = [a for a in row.morph.tags if a not in config.morph_inventory]
            if unknown:
                emit("R5-morph-inventory", f"target row {row.position} has unknown morph atoms {unknown}")

    # R6: lemma triple sanity.
    for row in verse.source:
        lemma = row.lemma
        if lemma.lemma is None and lemma.strong is None and lemma.concord is None:
            emit("R6-lemma-triple", f"source token {row.id.render()} has an all-empty lemma triple")
        elif lemma.lemma == "" or (lemma.concord is not None and lemma.concord < 1):
            emit("R6-lemma-triple", f"source token {row.id.render()} has a malformed lemma triple")

    # R7: content tokens (anything but particle codes) should be linked.
    referenced: set[TokenId] = set()
    for row in verse.target:
        if not config.pro_links_cover and row.lemma.kind == "extractor" and row.lemma.value == "pro":
            continue
        for ref in row.links.refs or ():
            if ref.verse_offset == 0:
                referenced.add(ref.target)
    for token in verse.source:
        is_particle = token.lemma.strong is not None and token.lemma.strong.kind == "particle"
        if not is_particle and token.id not in referenced:
            emit("R7-unlinked-source", f"source token {token.id.render()} ({token.lemma.render()}) is not referenced by any link")

    return out


@dataclass
class ValidationSummary:
    """Everything a review round needs: diagnostics, counts, coverage."""

    diagnostics: list[Diagnostic]
    rule_counts: dict[str, int]
    coverage: CoverageStats
    verses: int

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "warning"]


def validate_corpus(corpus: Corpus, config: ValidationConfig = DEFAULT_CONFIG) -> ValidationSummary:
    """Per-verse rules over every verse plus the corpus-scope checks."""
    diagnostics: list[Diagnostic] = []
    coverage = CoverageStats()
    for ref in corpus.verses:
        verse = corpus.verses[ref]
        diagnostics.extend(validate_verse(verse, config, extractors=corpus.extractors))
        coverage = coverage + coverage_stats(verse)

    def emit(rule_id: str, message: str, ref=None) -> None:
        severity = config.severity_of(rule_id)
        if severity is not None:
            diagnostics.append(Diagnostic(severity=severity, rule=rule_id, message=message, ref=ref))

    # C1: duplicated verse blocks.
    seen: set = set()
    for ref in corpus.verse_sequence:
        if ref in seen:
            emit("C1-duplicate-verse", f"verse {ref.render()} appears in more than one block", ref)
        seen.add(ref)

    # C2: unknown book codes.
    order = set(corpus.book_order)
    for book in sorted({r.book for r in corpus.verses}):
        if book not in order:
            emit("C2-unknown-book", f"book code {book!r} is not in the configured book order")

    # C3: ingestion order vs canonical order (duplicates are C1's job).
    prev = None
    for ref in corpus.verse_sequence:
        if prev is not None and ref != prev and ref.sort_key(corpus.book_order) < prev.sort_key(corpus.book_order):
            emit("C3-verse-order", f"verse {ref.render()} arrived after {prev.render()}", ref)
        prev = ref

    # C4: cross-verse links point at a real token of the offset verse.
    refs_in_order = corpus.refs_in_order()
    position = {ref: i for i, ref in enumerate(refs_in_order)}
    for ref in corpus.verses:
        verse = corpus.verses[ref]
        for row in verse.target:
            for link in row.links.refs or ():
                if link.verse_offset == 0:
                    continue
                idx = position[ref] + link.verse_offset
                if not (0 <= idx < len(refs_in_order)):
                    emit("C4-cross-verse", f"{ref.render()} row {row.position}: verse offset {link.verse_offset:+d} leaves the corpus", ref)
                    continue
                other = corpus.verses[refs_in_order[idx]]
                if link.target not in other.source_ids():
                    emit(
                        "C4-cross-verse",
                        f"{ref.render()} row {row.position}: token {link.target.render()} not in {other.ref.render()}",
                        ref,
                    )

    counts = {rule_id: 0 for rule_id in RULES}
    for d in diagnostics:
        counts[d.rule] = counts.get(d.rule, 0) + 1
    return ValidationSummary(
        diagnostics=diagnostics,
        rule_counts={k: v for k, v in counts.items() if v},
        coverage=coverage,
        verses=len(corpus.verses),
    )


def render_tsv(diagnostics: Sequence[Diagnostic]) -> str:
    return "".join(d.render() + "\n" for d in diagnostics)


def render_report(summary: ValidationSummary) -> str:
    """Human-readable validation report."""
    lines = [
        f"verses checked: {summary.verses}",
        f"errors: {len(summary.errors)}  warnings: {len(summary.warnings)}",
    ]
    if summary.rule_counts:
        lines.append("by rule:")
        for rule_id in sorted(summary.rule_counts):
            lines.append(f"  {rule_id}: {summary.rule_counts[rule_id]}")
    cov = summary.coverage
    lines.append(
        "coverage: "
        f"core={cov.core_linked} aux-only={cov.aux_only} no-source={cov.no_source} "
        f"extractors={cov.extractor_rows} unlinked-source={cov.unlinked_source}"
    )
    for d in summary.diagnostics:
        lines.append(d.render())
    return "\n".join(lines) + "\n"
