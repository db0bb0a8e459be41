"""In-memory model of a morpheme-aligned bitext.

One verse pairs an ordered list of source tokens (Hebrew or Greek
subtokens carrying lemma/Strong/concordance identifiers) with an ordered
list of target rows. Each target row either links to source token IDs
(``core`` links for lexical equivalence, ``aux`` links for phrasal
periphery such as articles and auxiliaries), carries no source support
at all (an epsilon row, written ``-``), or is an extractor row tying a
morphological property of the translation to a source function word.

Values here are immutable snapshots; all operations are pure. Mutation
(the editing service) replaces whole verses and never touches a shared
snapshot in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Literal, Optional

from .books import DEFAULT_BOOK_ORDER, book_position

LinkKind = Literal["core", "aux"]

#: Extractor kinds accepted by default: person suffix, verb modus,
#: tempus-aspect, case, and the pro-form referent extractor.
DEFAULT_EXTRACTORS: tuple[str, ...] = ("pers", "modus", "tasp", "case", "pro")


class DanglingLink(Exception):
    """A link names a source token ID that the verse does not contain."""

    def __init__(self, ref: "VerseRef", position: int, token: "TokenId"):
        self.ref = ref
        self.position = position
        self.token = token
        super().__init__(f"{ref.render()}: target row {position} links to missing source token {token.render()}")


@dataclass(frozen=True, order=True)
class VerseRef:
    """Book/chapter/verse address, rendered like ``ps001:001``."""

    book: str
    chapter: int
    verse: int

    def render(self) -> str:
        return f"{self.book}{self.chapter:03d}:{self.verse:03d}"

    def sort_key(self, book_order: tuple[str, ...] = DEFAULT_BOOK_ORDER) -> tuple[int, str, int, int]:
        # Unknown books sort after known ones, alphabetically, so ordering
        # stays total even for corpora with unconfigured codes.
        return (book_position(self.book, book_order), self.book, self.chapter, self.verse)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True, order=True)
class TokenId:
    """Word index within a verse plus an optional subtoken letter (``6b``)."""

    word: int
    sub: str = ""

    def __post_init__(self) -> None:
        if self.word < 1:
            raise ValueError(f"word index must be positive, got {self.word}")
        if self.sub and not (len(self.sub) == 1 and "a" <= self.sub <= "z"):
            raise ValueError(f"subtoken letter must be a single lowercase letter, got {self.sub!r}")

    def render(self) -> str:
        return f"{self.word}{self.sub}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class StrongCode:
    """Source lemma identifier: a Strong-style number with optional
    letter suffix (``834a``), a one-letter particle code (``d``), or a
    compound lemma-number + parsing-number pair (``2980&5660``)."""

    kind: Literal["numeric", "particle", "compound"]
    number: Optional[int] = None
    suffix: str = ""
    letter: str = ""
    parsing: Optional[int] = None

    @classmethod
    def numeric(cls, number: int, suffix: str = "") -> "StrongCode":
        return cls(kind="numeric", number=number, suffix=suffix)

    @classmethod
    def particle(cls, letter: str) -> "StrongCode":
        return cls(kind="particle", letter=letter)

    @classmethod
    def compound(cls, number: int, parsing: int) -> "StrongCode":
        return cls(kind="compound", number=number, parsing=parsing)

    def render(self) -> str:
        if self.kind == "numeric":
            return f"{self.number}{self.suffix}"
        if self.kind == "particle":
            return self.letter
        return f"{self.number}&{self.parsing}"

    def matches(self, query: str) -> bool:
        """True when a search query hits any slot of the code."""
        if query == self.render():
            return True
        if self.kind == "numeric":
            return query == str(self.number)
        if self.kind == "compound":
            return query in (str(self.number), str(self.parsing))
        return False

    def sort_key(self) -> tuple[int, int, str]:
        rank = {"particle": 0, "numeric": 1, "compound": 2}[self.kind]
        return (rank, self.number or 0, self.suffix or self.letter or str(self.parsing or ""))

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class SourceLemma:
    """Lemma / Strong number / concordance entry number triple.

    Absent slots render as ``-``; at least one slot should be present
    (the validator flags all-absent triples rather than the constructor,
    so that defective values can be represented and diagnosed).
    """

    lemma: Optional[str] = None
    strong: Optional[StrongCode] = None
    concord: Optional[int] = None

    def render(self) -> str:
        return "/".join(
            (
                self.lemma if self.lemma is not None else "-",
                self.strong.render() if self.strong is not None else "-",
                str(self.concord) if self.concord is not None else "-",
            )
        )


@dataclass(frozen=True)
class TargetLemma:
    """Lemma slot of a target row.

    ``plain`` is an ordinary headword; ``periphery`` is a parenthesized
    lemma marking epsilon-linked or aux material; ``extractor`` is a
    ``%``-prefixed morphological extractor; ``none`` is the bare dash.
    """

    kind: Literal["plain", "periphery", "extractor", "none"]
    value: str = ""

    @classmethod
    def plain(cls, lemma: str) -> "TargetLemma":
        return cls(kind="plain", value=lemma)

    @classmethod
    def periphery(cls, lemma: str) -> "TargetLemma":
        return cls(kind="periphery", value=lemma)

    @classmethod
    def extractor(cls, extractor_kind: str) -> "TargetLemma":
        return cls(kind="extractor", value=extractor_kind)

    @classmethod
    def none(cls) -> "TargetLemma":
        return cls(kind="none")

    def render(self) -> str:
        if self.kind == "plain":
            return self.value
        if self.kind == "periphery":
            return f"({self.value})"
        if self.kind == "extractor":
            return f"%{self.value}"
        return "-"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class LinkRef:
    """One link from a target row to a source token.

    ``verse_offset`` is 0 for ordinary verse-local links; a nonzero
    signed offset marks a cross-verse link (token of a neighboring
    verse), which only lenient format profiles accept.
    """

    target: TokenId
    kind: LinkKind = "core"
    verse_offset: int = 0

    def render(self) -> str:
        body = self.target.render()
        if self.verse_offset:
            body = f"{self.verse_offset:+d}:{body}"
        return f"({body})" if self.kind == "aux" else body


@dataclass(frozen=True)
class LinkField:
    """Link list of a target row, or the no-source marker ``-``.

    ``refs is None`` means the row has no source support (epsilon).
    """

    refs: Optional[tuple[LinkRef, ...]] = None

    def __post_init__(self) -> None:
        if self.refs is not None:
            if not self.refs:
                raise ValueError("a link list must be non-empty; use LinkField.no_source()")
            seen = [(r.target, r.verse_offset) for r in self.refs]
            if len(set(seen)) != len(seen):
                raise ValueError("duplicate token ID in link field")

    @classmethod
    def no_source(cls) -> "LinkField":
        return cls(refs=None)

    @classmethod
    def of(cls, refs: Iterable[LinkRef]) -> "LinkField":
        return cls(refs=tuple(refs))

    @property
    def is_no_source(self) -> bool:
        return self.refs is None

    def render(self) -> str:
        if self.refs is None:
            return "-"
        return " ".join(r.render() for r in self.refs)


@dataclass(frozen=True)
class MorphTags:
    """Ordered morphological tag atoms, rendered dot-joined (``Qal.3MS.PERF``)."""

    tags: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.tags:
            raise ValueError("morphology must have at least one tag atom")

    def render(self) -> str:
        return ".".join(self.tags)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class SourceToken:
    """One source-language subtoken row."""

    id: TokenId
    lemma: SourceLemma
    morph: MorphTags
    surface: str
    translit: str = ""


@dataclass(frozen=True)
class TargetToken:
    """One translation-side row: links, lemma, morphology, word form."""

    position: int
    links: LinkField
    lemma: TargetLemma
    morph: MorphTags
    surface: str
    trailing_space: bool = False

    @property
    def is_extractor(self) -> bool:
        return self.lemma.kind == "extractor"


@dataclass(frozen=True)
class AlignmentGroup:
    """A connected component of the core-link graph of one verse."""

    source_ids: frozenset[TokenId]
    target_positions: frozenset[int]

    def min_source(self) -> TokenId:
        return min(self.source_ids)


@dataclass(frozen=True)
class VerseAlignment:
    """All source and target rows of one verse."""

    ref: VerseRef
    source: tuple[SourceToken, ...]
    target: tuple[TargetToken, ...]

    def source_ids(self) -> frozenset[TokenId]:
        return frozenset(t.id for t in self.source)

    def source_by_id(self) -> dict[TokenId, SourceToken]:
        return {t.id: t for t in self.source}


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of verse alignments plus its inventories.

    ``verse_sequence`` preserves the order blocks appeared in the input,
    including duplicates, so corpus-level sanity checks can see them
    even though the mapping keeps only the first occurrence.
    """

    label: str = ""
    verses: dict[VerseRef, VerseAlignment] = field(default_factory=dict)
    book_order: tuple[str, ...] = DEFAULT_BOOK_ORDER
    extractors: tuple[str, ...] = DEFAULT_EXTRACTORS
    morph_inventory: Optional[frozenset[str]] = None
    verse_sequence: tuple[VerseRef, ...] = ()

    def refs_in_order(self) -> list[VerseRef]:
        return sorted(self.verses, key=lambda r: r.sort_key(self.book_order))

    def books(self) -> list[str]:
        seen: dict[str, None] = {}
        for ref in self.refs_in_order():
            seen.setdefault(ref.book, None)
        return list(seen)

    def with_verse(self, verse: VerseAlignment) -> "Corpus":
        new = dict(self.verses)
        new[verse.ref] = verse
        seq = self.verse_sequence if verse.ref in self.verses else self.verse_sequence + (verse.ref,)
        return replace(self, verses=new, verse_sequence=seq)


@dataclass(frozen=True)
class ResolvedLink:
    """One link hit produced by :func:`resolve_links`."""

    position: int
    token: SourceToken
    kind: LinkKind


def resolve_links(verse: VerseAlignment) -> list[ResolvedLink]:
    """Resolve every verse-local link of every target row, in row order.

    No-source rows contribute nothing. Cross-verse links cannot be
    resolved against this verse alone and are skipped here; the corpus
    validator checks them. Raises :class:`DanglingLink` on the first
    link whose token ID is absent from the source side.
    """
    by_id = verse.source_by_id()
    out: list[ResolvedLink] = []
    for row in verse.target:
        if row.links.is_no_source:
            continue
        for ref in row.links.refs or ():
            if ref.verse_offset:
                continue
            token = by_id.get(ref.target)
            if token is None:
                raise DanglingLink(verse.ref, row.position, ref.target)
            out.append(ResolvedLink(position=row.position, token=token, kind=ref.kind))
    return out


def alignment_groups(verse: VerseAlignment) -> list[AlignmentGroup]:
    """Connected components of the bipartite core-link graph.

    Aux links never affect membership. Groups come back ordered by their
    smallest source token ID. Raises :class:`DanglingLink` like
    :func:`resolve_links`.
    """
    resolved = resolve_links(verse)
    parent: dict[object, object] = {}

    def find(x: object) -> object:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: object, b: object) -> None:
        parent.setdefault(a, a)
        parent.setdefault(b, b)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for hit in resolved:
        if hit.kind != "core":
            continue
        union(("s", hit.token.id), ("t", hit.position))

    components: dict[object, tuple[set[TokenId], set[int]]] = {}
    for node in parent:
        side, value = node  # type: ignore[misc]
        root = find(node)
        sources, targets = components.setdefault(root, (set(), set()))
        if side == "s":
            sources.add(value)
        else:
            targets.add(value)

    groups = [
        AlignmentGroup(source_ids=frozenset(s), target_positions=frozenset(t))
        for s, t in components.values()
        if s
    ]
    groups.sort(key=lambda g: g.min_source())
    return groups


@dataclass(frozen=True)
class CoverageStats:
    """Per-verse link coverage counts.

    The first four fields partition the target rows (extractor rows are
    counted as extractors even though they carry links); the last counts
    source tokens that no link of any kind refers to.
    """

    core_linked: int = 0
    aux_only: int = 0
    no_source: int = 0
    extractor_rows: int = 0
    unlinked_source: int = 0

    def __add__(self, other: "CoverageStats") -> "CoverageStats":
        return CoverageStats(
            self.core_linked + other.core_linked,
            self.aux_only + other.aux_only,
            self.no_source + other.no_source,
            self.extractor_rows + other.extractor_rows,
            self.unlinked_source + other.unlinked_source,
        )


def coverage_stats(verse: VerseAlignment) -> CoverageStats:
    """Count target rows by link status and source tokens left unreferenced."""
    core = aux_only = none = extract = 0
    referenced: set[TokenId] = set()
    for row in verse.target:
        for ref in row.links.refs or ():
            if not ref.verse_offset:
                referenced.add(ref.target)
        if row.is_extractor:
            extract += 1
        elif row.links.is_no_source:
            none += 1
        elif any(r.kind == "core" for r in row.links.refs or ()):
            core += 1
        else:
            aux_only += 1
    unlinked = sum(1 for t in verse.source if t.id not in referenced)
    return CoverageStats(core, aux_only, none, extract, unlinked)


def detokenize_target(verse: VerseAlignment) -> str:
    """Rebuild the running translation text from the target rows.

    Extractor rows carry no word form and are skipped; every other row
    contributes its surface plus a single space when its trailing-space
    flag is set.
    """
    parts: list[str] = []
    for row in verse.target:
        if row.is_extractor:
            continue
        parts.append(row.surface)
        if row.trailing_space:
            parts.append(" ")
    return "".join(parts)


def iter_verses(corpus: Corpus) -> Iterator[VerseAlignment]:
    """Verses in canonical order."""
    for ref in corpus.refs_in_order():
        yield corpus.verses[ref]
