"""Registry of diagnostic rules.

Every diagnostic emitted anywhere in the toolkit cites one of these
stable rule ids. ``R`` rules check alignment guidelines per verse,
``C`` rules check corpus-level sanity, ``F`` rules cover format-level
defects found while parsing.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Rule:
    id: str
    severity: str  # default severity: "error" | "warning"
    scope: str  # "verse" | "corpus" | "format"
    description: str


_ALL = [
    Rule("R1-dangling-link", "error", "verse", "every link resolves to an existing source token"),
    Rule("R2-token-order", "error", "verse", "source token IDs are strictly increasing, letters contiguous from 'a', bare and lettered IDs never share a word"),
    Rule("R3-extractor-links", "error", "verse", "extractor rows carry real links and a known %-kind"),
    Rule("R4-nosource-lemma", "warning", "verse", "rows without source support carry a parenthesized or dash lemma"),
    Rule("R5-morph-inventory", "warning", "verse", "morphology atoms belong to the configured inventory"),
    Rule("R6-lemma-triple", "error", "verse", "lemma triples have at least one well-formed slot"),
    Rule("R7-unlinked-source", "warning", "verse", "every content source token is referenced by at least one link"),
    Rule("C1-duplicate-verse", "error", "corpus", "no verse appears in more than one block"),
    Rule("C2-unknown-book", "error", "corpus", "every book code is in the configured book order"),
    Rule("C3-verse-order", "warning", "corpus", "verse blocks appear in canonical order"),
    Rule("C4-cross-verse", "error", "corpus", "cross-verse links resolve to a token of the offset verse"),
    Rule("F1-columns", "error", "format", "every row has exactly the fixed column count"),
    Rule("F2-verse-ref", "error", "format", "the verse field parses as a reference"),
    Rule("F3-row-shape", "error", "format", "exactly one of token ID and linked IDs is populated"),
    Rule("F4-field", "error", "format", "field contents parse under their column's grammar"),
    Rule("F5-mixed-refs", "error", "format", "a block holds rows of a single verse"),
    Rule("F6-source-order", "error", "format", "source rows are ordered by token ID"),
    Rule("F7-interleaved", "error", "format", "source rows precede target rows"),
    Rule("F8-empty-surface", "error", "format", "word forms are non-empty except on extractor rows"),
    Rule("F9-comment", "error", "format", "comment lines require a lenient profile"),
    Rule("F10-disorder", "warning", "format", "verse blocks arrive in canonical order"),
    Rule("F11-duplicate-block", "warning", "format", "later blocks for an already-seen verse are dropped"),
    Rule("F12-target-translit", "warning", "format", "target rows leave the transliteration column empty"),
    Rule("F13-unknown-extractor", "warning", "format", "extractor kinds come from the configured inventory"),
]

RULES: dict[str, Rule] = {r.id: r for r in _ALL}

VERSE_RULES = tuple(r.id for r in _ALL if r.scope == "verse")
CORPUS_RULES = tuple(r.id for r in _ALL if r.scope == "corpus")
