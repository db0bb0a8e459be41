"""Parser and serializer for the column-oriented alignment format.

Every row is one line of seven TAB-separated fields: verse, token ID,
linked IDs, lemma, morphology, word form, transliteration. Source rows
have a populated token-ID field and an empty linked-IDs field; target
rows the other way around. A verse block is a run of consecutive rows
sharing the verse field, source rows first.

Parsing is diagnostic-driven: malformed input never raises past the
field level. Corpus ingestion collects diagnostics and drops only the
verses it cannot represent, so one bad verse never aborts a load.
Serialization of a canonically formatted file reproduces it byte for
byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .books import DEFAULT_BOOK_ORDER
from .model import (
    DEFAULT_EXTRACTORS,
    Corpus,
    LinkField,
    LinkRef,
    MorphTags,
    SourceLemma,
    SourceToken,
    StrongCode,
    TargetLemma,
    TargetToken,
    TokenId,
    VerseAlignment,
    VerseRef,
)

#: Fixed column order of the format.
COLUMNS = ("verse", "token ID", "linked IDs", "lemma", "morphology", "word form", "transliteration")


class ParseError(ValueError):
    """Base for field-level parse failures."""


class MalformedVerseRef(ParseError):
    pass


class MalformedTokenId(ParseError):
    pass


class MalformedStrongCode(ParseError):
    pass


class MalformedLemmaTriple(ParseError):
    pass


class MalformedTargetLemma(ParseError):
    pass


class MalformedLinkField(ParseError):
    pass


class MalformedMorphTags(ParseError):
    pass


class UnknownExtractor(ParseError):
    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"unknown extractor kind {kind!r}")


class EmptyBlock(ParseError):
    pass


class CrossVerseNotAllowed(ValueError):
    """A strict profile met a cross-verse link."""


@dataclass(frozen=True)
class FormatProfile:
    """Tunable surface conventions of the column format.

    ``marker`` is the literal suffix of the word-form field that encodes
    a trailing space in the running text. ``lenient`` additionally
    accepts comment lines, unknown extractor kinds, interleaved row
    order, and the cross-verse link extension.
    """

    separator: str = "\t"
    marker: str = " _␣"
    lenient: bool = False

    def __post_init__(self) -> None:
        if len(self.separator) != 1:
            raise ValueError("column separator must be a single character")
        if not self.marker:
            raise ValueError("trailing-space marker must be non-empty")


DEFAULT_PROFILE = FormatProfile()
LENIENT_PROFILE = FormatProfile(lenient=True)


@dataclass(frozen=True)
class Diagnostic:
    """One problem found while parsing or validating."""

    severity: str  # "error" | "warning"
    rule: str
    message: str
    ref: Optional[VerseRef] = None
    line: int = 0
    file: str = ""

    def render(self) -> str:
        where = f"{self.file}:" if self.file else ""
        where += f"line {self.line}" if self.line else (self.ref.render() if self.ref else "-")
        return f"{self.severity}\t{self.rule}\t{where}\t{self.message}"

    def sort_key(self) -> tuple:
        return (self.file, self.line, self.rule, self.message)


def errors_of(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diagnostics if d.severity == "error"]


# --- field parsers ---------------------------------------------------------

_VERSE_RE = re.compile(r"^([a-z]{2,5})(\d{3}):(\d{3})$")
_TOKEN_RE = re.compile(r"^(\d+)([a-z]?)$")
_STRONG_NUM_RE = re.compile(r"^(\d+)([a-z]?)$")
_STRONG_COMPOUND_RE = re.compile(r"^(\d+)&(\d+)$")
_MORPH_ATOM_RE = re.compile(r"^[A-Za-z0-9]+$")
_CROSS_VERSE_RE = re.compile(r"^([+-]\d+):(.+)$")


def parse_verse_ref(text: str) -> VerseRef:
    m = _VERSE_RE.match(text)
    if not m:
        raise MalformedVerseRef(f"bad verse reference {text!r}")
    chapter, verse = int(m.group(2)), int(m.group(3))
    if chapter < 1 or verse < 1:
        raise MalformedVerseRef(f"chapter and verse must be positive in {text!r}")
    return VerseRef(m.group(1), chapter, verse)


def parse_token_id(text: str) -> TokenId:
    m = _TOKEN_RE.match(text)
    if not m or int(m.group(1)) < 1:
        raise MalformedTokenId(f"bad token ID {text!r}")
    return TokenId(int(m.group(1)), m.group(2))


def parse_strong_code(text: str) -> StrongCode:
    m = _STRONG_COMPOUND_RE.match(text)
    if m:
        return StrongCode.compound(int(m.group(1)), int(m.group(2)))
    m = _STRONG_NUM_RE.match(text)
    if m:
        return StrongCode.numeric(int(m.group(1)), m.group(2))
    if len(text) == 1 and "a" <= text <= "z":
        return StrongCode.particle(text)
    raise MalformedStrongCode(f"bad lemma number {text!r}")


def parse_source_lemma(text: str) -> SourceLemma:
    parts = text.split("/")
    if len(parts) != 3:
        raise MalformedLemmaTriple(f"lemma field needs exactly three /-separated slots, got {text!r}")
    raw_lemma, raw_strong, raw_concord = parts
    lemma = None if raw_lemma == "-" else raw_lemma
    if lemma == "":
        raise MalformedLemmaTriple(f"empty lemma slot in {text!r}")
    strong = None
    if raw_strong != "-":
        try:
            strong = parse_strong_code(raw_strong)
        except MalformedStrongCode as exc:
            raise MalformedLemmaTriple(str(exc)) from exc
    concord = None
    if raw_concord != "-":
        if not raw_concord.isdigit() or int(raw_concord) < 1:
            raise MalformedLemmaTriple(f"concordance entry number must be a positive integer in {text!r}")
        concord = int(raw_concord)
    if lemma is None and strong is None and concord is None:
        raise MalformedLemmaTriple("lemma triple needs at least one populated slot")
    return SourceLemma(lemma=lemma, strong=strong, concord=concord)


def parse_target_lemma(
    text: str,
    extractors: Sequence[str] = DEFAULT_EXTRACTORS,
    lenient: bool = False,
) -> TargetLemma:
    if not text:
        raise MalformedTargetLemma("empty lemma field")
    if text == "-":
        return TargetLemma.none()
    if text.startswith("%"):
        kind = text[1:]
        if not kind.isalpha() or not kind.islower():
            raise MalformedTargetLemma(f"bad extractor {text!r}")
        if kind not in extractors and not lenient:
            raise UnknownExtractor(kind)
        return TargetLemma.extractor(kind)
    if text.startswith("(") and text.endswith(")"):
        inner = text[1:-1]
        if not inner:
            raise MalformedTargetLemma("empty parenthesized lemma")
        return TargetLemma.periphery(inner)
    return TargetLemma.plain(text)


def _parse_link_item(item: str, lenient: bool) -> LinkRef:
    kind = "core"
    body = item
    if body.startswith("(") or body.endswith(")"):
        if not (body.startswith("(") and body.endswith(")")) or len(body) < 3:
            raise MalformedLinkField(f"unbalanced parentheses in link {item!r}")
        kind = "aux"
        body = body[1:-1]
    offset = 0
    m = _CROSS_VERSE_RE.match(body)
    if m:
        if not lenient:
            raise MalformedLinkField(f"cross-verse link {item!r} requires a lenient profile")
        offset = int(m.group(1))
        if offset == 0:
            raise MalformedLinkField(f"cross-verse offset must be nonzero in {item!r}")
        body = m.group(2)
    try:
        token = parse_token_id(body)
    except MalformedTokenId as exc:
        raise MalformedLinkField(f"bad token ID in link {item!r}") from exc
    return LinkRef(target=token, kind=kind, verse_offset=offset)


def parse_link_field(text: str, lenient: bool = False) -> LinkField:
    items = text.split()
    if not items:
        raise MalformedLinkField("empty link field")
    if "-" in items:
        if len(items) > 1:
            raise MalformedLinkField(f"no-source dash mixed with links in {text!r}")
        return LinkField.no_source()
    refs = [_parse_link_item(item, lenient) for item in items]
    seen = [(r.target, r.verse_offset) for r in refs]
    if len(set(seen)) != len(seen):
        raise MalformedLinkField(f"duplicate token ID in {text!r}")
    return LinkField.of(refs)


def parse_morph_tags(text: str) -> MorphTags:
    atoms = text.split(".")
    if not atoms or any(not _MORPH_ATOM_RE.match(a) for a in atoms):
        raise MalformedMorphTags(f"bad morphology field {text!r}")
    return MorphTags(tuple(atoms))


# --- row and block parsing -------------------------------------------------


@dataclass
class _Row:
    line: int
    ref: VerseRef
    source: Optional[SourceToken] = None
    target_links: Optional[LinkField] = None
    target_lemma: Optional[TargetLemma] = None
    target_morph: Optional[MorphTags] = None
    target_surface: str = ""
    target_trailing: bool = False

    @property
    def is_source(self) -> bool:
        return self.source is not None


def _split_word_form(text: str, profile: FormatProfile) -> tuple[str, bool]:
    if text.endswith(profile.marker):
        return text[: -len(profile.marker)], True
    return text, False


def _parse_row(
    line_no: int,
    text: str,
    profile: FormatProfile,
    extractors: Sequence[str],
    diags: list[Diagnostic],
    file: str = "",
) -> Optional[_Row]:
    def err(rule: str, message: str, ref: Optional[VerseRef] = None) -> None:
        diags.append(Diagnostic("error", rule, message, ref=ref, line=line_no, file=file))

    fields = text.split(profile.separator)
    if len(fields) != len(COLUMNS):
        err("F1-columns", f"expected {len(COLUMNS)} columns, got {len(fields)}")
        return None
    raw_ref, raw_id, raw_links, raw_lemma, raw_morph, raw_form, raw_translit = fields
    try:
        ref = parse_verse_ref(raw_ref)
    except MalformedVerseRef as exc:
        err("F2-verse-ref", str(exc))
        return None

    has_id, has_links = bool(raw_id), bool(raw_links)
    if has_id == has_links:
        err(
            "F3-row-shape",
            "exactly one of the token-ID and linked-IDs fields must be populated",
            ref,
        )
        return None

    if has_id:
        try:
            token = SourceToken(
                id=parse_token_id(raw_id),
                lemma=parse_source_lemma(raw_lemma),
                morph=parse_morph_tags(raw_morph),
                surface=raw_form,
                translit=raw_translit,
            )
        except ParseError as exc:
            err("F4-field", str(exc), ref)
            return None
        if not raw_form:
            err("F8-empty-surface", "source row has an empty word form", ref)
            return None
        return _Row(line=line_no, ref=ref, source=token)

    try:
        links = parse_link_field(raw_links, lenient=profile.lenient)
        lemma = parse_target_lemma(raw_lemma, extractors, lenient=profile.lenient)
        morph = parse_morph_tags(raw_morph)
    except ParseError as exc:
        err("F4-field", str(exc), ref)
        return None
    if lemma.kind == "extractor" and lemma.value not in extractors:
        diags.append(
            Diagnostic(
                "warning",
                "F13-unknown-extractor",
                f"extractor %{lemma.value} is not in the configured inventory",
                ref=ref,
                line=line_no,
                file=file,
            )
        )
    surface, trailing = _split_word_form(raw_form, profile)
    if not surface and lemma.kind != "extractor":
        err("F8-empty-surface", "non-extractor target row has an empty word form", ref)
        return None
    if raw_translit:
        diags.append(
            Diagnostic(
                "warning",
                "F12-target-translit",
                "transliteration on a target row is dropped",
                ref=ref,
                line=line_no,
                file=file,
            )
        )
    return _Row(
        line=line_no,
        ref=ref,
        target_links=links,
        target_lemma=lemma,
        target_morph=morph,
        target_surface=surface,
        target_trailing=trailing,
    )


def _check_source_order(tokens: Sequence[SourceToken]) -> list[str]:
    """Well-formedness of the source token-ID sequence.

    Strictly increasing; lettered subtokens of a word contiguous and
    starting at ``a``; a bare and a lettered ID never share a word.
    """
    problems: list[str] = []
    prev: Optional[TokenId] = None
    for token in tokens:
        tid = token.id
        if prev is not None and tid <= prev:
            problems.append(f"token ID {tid.render()} does not increase after {prev.render()}")
        if tid.sub:
            if tid.sub == "a":
                if prev is not None and prev.word == tid.word:
                    problems.append(f"subtoken {tid.render()} follows a bare ID for the same word")
            else:
                expected = chr(ord(tid.sub) - 1)
                if prev is None or prev.word != tid.word or prev.sub != expected:
                    problems.append(f"subtoken {tid.render()} is not contiguous with {tid.word}{expected}")
        elif prev is not None and prev.word == tid.word:
            problems.append(f"bare ID {tid.render()} shares a word with subtoken {prev.render()}")
        prev = tid
    return problems


def parse_verse_block(
    lines: Sequence[tuple[int, str]],
    profile: FormatProfile = DEFAULT_PROFILE,
    extractors: Sequence[str] = DEFAULT_EXTRACTORS,
    file: str = "",
) -> tuple[Optional[VerseAlignment], list[Diagnostic]]:
    """Parse one verse block given as (line number, text) pairs.

    Returns the verse plus diagnostics; the verse is None when an
    error-severity diagnostic made the block unrepresentable. Raises
    :class:`EmptyBlock` when there are no rows at all.
    """
    if not lines:
        raise EmptyBlock("verse block has no rows")
    diags: list[Diagnostic] = []
    rows: list[_Row] = []
    for line_no, text in lines:
        row = _parse_row(line_no, text, profile, extractors, diags, file=file)
        if row is not None:
            rows.append(row)

    if rows:
        ref = rows[0].ref
        mixed = [r for r in rows if r.ref != ref]
        if mixed:
            diags.append(
                Diagnostic(
                    "error",
                    "F5-mixed-refs",
                    f"block mixes verse references {ref.render()} and {mixed[0].ref.render()}",
                    ref=ref,
                    line=mixed[0].line,
                    file=file,
                )
            )

    if errors_of(diags):
        return None, diags

    ref = rows[0].ref
    source_rows = [r for r in rows if r.is_source]
    target_rows = [r for r in rows if not r.is_source]

    first_target = next((i for i, r in enumerate(rows) if not r.is_source), None)
    interleaved = first_target is not None and any(r.is_source for r in rows[first_target:])
    if interleaved:
        severity = "warning" if profile.lenient else "error"
        diags.append(
            Diagnostic(
                severity,
                "F7-interleaved",
                "source rows appear after target rows; block re-canonicalized"
                if profile.lenient
                else "source rows must precede target rows",
                ref=ref,
                line=rows[first_target].line,
                file=file,
            )
        )
        if not profile.lenient:
            return None, diags

    for problem in _check_source_order([r.source for r in source_rows]):  # type: ignore[misc]
        severity = "warning" if profile.lenient else "error"
        diags.append(
            Diagnostic(severity, "F6-source-order", problem, ref=ref, line=source_rows[0].line, file=file)
        )
    if errors_of(diags):
        return None, diags

    verse = VerseAlignment(
        ref=ref,
        source=tuple(r.source for r in source_rows),  # type: ignore[misc]
        target=tuple(
            TargetToken(
                position=i,
                links=r.target_links,  # type: ignore[arg-type]
                lemma=r.target_lemma,  # type: ignore[arg-type]
                morph=r.target_morph,  # type: ignore[arg-type]
                surface=r.target_surface,
                trailing_space=r.target_trailing,
            )
            for i, r in enumerate(target_rows)
        ),
    )
    return verse, diags


def parse_corpus(
    lines: Iterable[str],
    profile: FormatProfile = DEFAULT_PROFILE,
    *,
    label: str = "",
    book_order: tuple[str, ...] = DEFAULT_BOOK_ORDER,
    extractors: tuple[str, ...] = DEFAULT_EXTRACTORS,
    morph_inventory: Optional[frozenset[str]] = None,
    file: str = "",
) -> tuple[Corpus, list[Diagnostic]]:
    """Ingest a whole corpus stream, collecting diagnostics.

    Parsing never raises on malformed content: bad verses are dropped
    with an error diagnostic, disorder and duplicates are warned about,
    and every successfully parsed verse lands in the corpus.
    """
    diags: list[Diagnostic] = []
    verses: dict[VerseRef, VerseAlignment] = {}
    sequence: list[VerseRef] = []

    block: list[tuple[int, str]] = []
    block_key: Optional[str] = None

    def flush() -> None:
        nonlocal block, block_key
        if not block:
            return
        verse, block_diags = parse_verse_block(block, profile, extractors, file=file)
        diags.extend(block_diags)
        if verse is not None:
            if sequence and verse.ref.sort_key(book_order) < sequence[-1].sort_key(book_order):
                diags.append(
                    Diagnostic(
                        "warning",
                        "F10-disorder",
                        f"verse {verse.ref.render()} is out of canonical order",
                        ref=verse.ref,
                        line=block[0][0],
                        file=file,
                    )
                )
            sequence.append(verse.ref)
            if verse.ref in verses:
                diags.append(
                    Diagnostic(
                        "warning",
                        "F11-duplicate-block",
                        f"duplicate block for {verse.ref.render()}; keeping the first",
                        ref=verse.ref,
                        line=block[0][0],
                        file=file,
                    )
                )
            else:
                verses[verse.ref] = verse
        block = []
        block_key = None

    for line_no, raw in enumerate(lines, start=1):
        text = raw.rstrip("\n").rstrip("\r")
        if not text.strip():
            flush()
            continue
        if text.startswith("#"):
            if not profile.lenient:
                diags.append(
                    Diagnostic(
                        "error",
                        "F9-comment",
                        "comment lines are not allowed by a strict profile",
                        line=line_no,
                        file=file,
                    )
                )
            continue
        key = text.split(profile.separator, 1)[0]
        if block_key is not None and key != block_key:
            flush()
        block_key = key
        block.append((line_no, text))
    flush()

    corpus = Corpus(
        label=label,
        verses=verses,
        book_order=book_order,
        extractors=extractors,
        morph_inventory=morph_inventory,
        verse_sequence=tuple(sequence),
    )
    return corpus, diags


# --- serialization ---------------------------------------------------------


def _require_verse_local(verse: VerseAlignment, profile: FormatProfile) -> None:
    if profile.lenient:
        return
    for row in verse.target:
        for ref in row.links.refs or ():
            if ref.verse_offset:
                raise CrossVerseNotAllowed(
                    f"{verse.ref.render()}: cross-verse link {ref.render()} needs a lenient profile"
                )


def serialize_verse(verse: VerseAlignment, profile: FormatProfile = DEFAULT_PROFILE) -> str:
    """Render one verse block, source rows first, one line per row."""
    _require_verse_local(verse, profile)
    sep = profile.separator
    ref = verse.ref.render()
    out: list[str] = []
    for token in verse.source:
        out.append(
            sep.join((ref, token.id.render(), "", token.lemma.render(), token.morph.render(), token.surface, token.translit))
        )
    for row in verse.target:
        form = row.surface + (profile.marker if row.trailing_space else "")
        out.append(sep.join((ref, "", row.links.render(), row.lemma.render(), row.morph.render(), form, "")))
    return "\n".join(out) + "\n"


def serialize_corpus(
    corpus: Corpus,
    profile: FormatProfile = DEFAULT_PROFILE,
    canonical_order: bool = False,
) -> str:
    """Render a corpus; by default in the order verses were ingested."""
    refs = corpus.refs_in_order() if canonical_order else list(corpus.verses)
    return "".join(serialize_verse(corpus.verses[r], profile) for r in refs)


# --- profile files and path loading ---------------------------------------


def load_profile(path: str | Path) -> FormatProfile:
    """Read a key=value profile file (keys: separator, marker, lenient)."""
    separator, marker, lenient = "\t", DEFAULT_PROFILE.marker, False
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        if "=" not in raw:
            raise ValueError(f"bad profile line {raw!r}")
        key, value = raw.split("=", 1)
        key = key.strip()
        if key == "separator":
            separator = value.replace("\\t", "\t")
        elif key == "marker":
            marker = value.replace("\\t", "\t")
        elif key == "lenient":
            lenient = value.strip().lower() in ("1", "true", "yes", "on")
        else:
            raise ValueError(f"unknown profile key {key!r}")
    return FormatProfile(separator=separator, marker=marker, lenient=lenient)


def load_corpus_path(
    path: str | Path,
    profile: FormatProfile = DEFAULT_PROFILE,
    **kwargs,
) -> tuple[Corpus, list[Diagnostic]]:
    """Load a corpus from one file or from every file of a directory.

    Directory contents are read in sorted name order; diagnostics carry
    the file name and merge deterministically by (file, line).
    """
    path = Path(path)
    label = kwargs.pop("label", path.stem)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file() and not p.name.startswith("."))
        corpus = Corpus(
            label=label,
            book_order=kwargs.get("book_order", DEFAULT_BOOK_ORDER),
            extractors=kwargs.get("extractors", DEFAULT_EXTRACTORS),
            morph_inventory=kwargs.get("morph_inventory"),
        )
        verses: dict[VerseRef, VerseAlignment] = {}
        sequence: list[VerseRef] = []
        diags: list[Diagnostic] = []
        for f in files:
            with open(f, encoding="utf-8", errors="replace") as handle:
                part, part_diags = parse_corpus(handle, profile, label=label, file=f.name, **kwargs)
            diags.extend(part_diags)
            for ref, verse in part.verses.items():
                if ref in verses:
                    diags.append(
                        Diagnostic(
                            "warning",
                            "F11-duplicate-block",
                            f"duplicate block for {ref.render()}; keeping the first",
                            ref=ref,
                            file=f.name,
                        )
                    )
                else:
                    verses[ref] = verse
            sequence.extend(part.verse_sequence)
        diags.sort(key=Diagnostic.sort_key)
        return replace(corpus, verses=verses, verse_sequence=tuple(sequence)), diags
    with open(path, encoding="utf-8", errors="replace") as handle:
        return parse_corpus(handle, profile, label=label, file=path.name, **kwargs)


def save_corpus_path(corpus: Corpus, path: str | Path, profile: FormatProfile = DEFAULT_PROFILE, **kwargs) -> None:
    Path(path).write_text(serialize_corpus(corpus, profile, **kwargs), encoding="utf-8")
