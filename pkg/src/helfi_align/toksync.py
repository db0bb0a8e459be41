"""Harmonization of divergent Hebrew word segmentations.

Two morphological analyses of the same text rarely agree on token
boundaries. Harmonization works in three layers: (1) a whitespace token
boundary is forced after every maqef linker; (2) prefix boundaries
(conjunctions, prepositions, the article) become lettered subtokens;
(3) suffix boundaries are annotations only — a suffix never becomes a
subtoken of its own, so suffix splits get merged back into their host.

Words travel as :class:`SegmentedWord` values: a list of segments, each
carrying the boundary that follows it. The interchange text form uses
``+`` for prefix boundaries, ``=`` for suffix boundaries, ``/`` for
splits of unstated kind, a space (or ``□``) for a whitespace boundary,
and the maqef character itself for an unspaced maqef join.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .model import TokenId, VerseRef

MAQEF = "־"

#: Single-consonant prefixes: conjunction vav, article he, and the
#: prepositions bet, kaf, lamed, mem, shin. Matching ignores pointing.
DEFAULT_PREFIXES: frozenset[str] = frozenset("והבכלמש")

# Hebrew points and accents; everything here is ignored when comparing
# the underlying letter skeleton. The maqef (U+05BE) is a skeleton char.
_POINTING_RE = re.compile(r"[֑-ֽֿ-ׇ]")

BOUNDARIES = ("none", "space", "maqef", "prefix", "suffix", "split")
_MARKER_FOR = {"none": "", "space": " ", "maqef": "", "prefix": "+", "suffix": "=", "split": "/"}


class TextMismatch(ValueError):
    """The two segmentations do not spell the same letters."""


class TooManySubtokens(ValueError):
    """A word would need more than 26 lettered subtokens."""


def strip_pointing(text: str) -> str:
    return _POINTING_RE.sub("", text)


@dataclass(frozen=True)
class Segment:
    """One piece of a word plus the boundary that follows it.

    ``suffix_breaks`` records character offsets inside ``text`` where a
    suffix boundary was merged away; the information survives merging
    without the suffix counting as a subtoken.
    """

    text: str
    boundary: str = "none"
    suffix_breaks: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("segment text must be non-empty")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"unknown boundary kind {self.boundary!r}")


@dataclass(frozen=True)
class SegmentedWord:
    """A word (or maqef-joined word cluster) as an ordered segment list."""

    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("a segmented word needs at least one segment")
        if self.segments[-1].boundary not in ("none", "space"):
            raise ValueError("the final boundary must be none or a space")

    def text(self) -> str:
        return "".join(s.text for s in self.segments)

    def skeleton(self) -> str:
        return strip_pointing(self.text())


@dataclass(frozen=True)
class Discrepancy:
    """One segmentation disagreement, classified by harmonization layer."""

    layer: int
    ref: VerseRef
    word: int
    kind: str
    description: str


_NORMALIZE_RE = re.compile(r"\s*([+=/])\s*")


def parse_segmented(text: str) -> SegmentedWord:
    """Read the interchange form of one word.

    Spaces around explicit markers are display padding and ignored; the
    ``□`` character is an alias for a space boundary. A maqef inside the
    text implies a boundary even without a marker after it.
    """
    normalized = _NORMALIZE_RE.sub(r"\1", text.replace("□", " ").strip())
    if not normalized:
        raise ValueError("empty segmented word")
    segments: list[Segment] = []
    buf: list[str] = []

    def push(boundary: str) -> None:
        if not buf:
            # An explicit marker directly after a maqef refines the
            # implicit maqef boundary instead of opening a new segment.
            if segments and segments[-1].boundary == "maqef":
                segments[-1] = replace(segments[-1], boundary=boundary)
                return
            raise ValueError(f"empty segment in {text!r}")
        segments.append(Segment("".join(buf), boundary))
        buf.clear()

    for ch in normalized:
        if ch == "+":
            push("prefix")
        elif ch == "=":
            push("suffix")
        elif ch == "/":
            push("split")
        elif ch == " ":
            push("space")
        else:
            buf.append(ch)
            if ch == MAQEF:
                push("maqef")
    if buf:
        push("none")
    # A trailing maqef boundary on the last segment is a plain word end.
    if segments and segments[-1].boundary == "maqef":
        segments[-1] = replace(segments[-1], boundary="none")
    return SegmentedWord(tuple(segments))


def render_segmented(word: SegmentedWord) -> str:
    """Interchange form; merged suffix positions re-surface as ``=``."""
    out: list[str] = []
    for seg in word.segments:
        text = seg.text
        for offset in reversed(seg.suffix_breaks):
            text = text[:offset] + "=" + text[offset:]
        out.append(text)
        out.append(_MARKER_FOR[seg.boundary])
    return "".join(out).rstrip()


def insert_maqef_space(word: SegmentedWord) -> SegmentedWord:
    """Force a whitespace token boundary after every maqef linker."""
    segments = []
    for i, seg in enumerate(word.segments):
        last = i == len(word.segments) - 1
        if seg.text.endswith(MAQEF) and not last and seg.boundary != "space":
            seg = replace(seg, boundary="space")
        segments.append(seg)
    return SegmentedWord(tuple(segments))


def classify_split(
    word: SegmentedWord,
    prefixes: frozenset[str] = DEFAULT_PREFIXES,
) -> SegmentedWord:
    """Decide for every unstated ``split`` boundary whether it is
    prefixal or suffixal.

    A boundary is prefixal iff every segment between the last whitespace
    boundary and the split is in the prefix inventory (pointing
    ignored); anything after a non-prefix is suffixal.
    """
    segments = list(word.segments)
    all_prefixes_so_far = True
    for i, seg in enumerate(segments):
        if seg.boundary in ("space", "maqef"):
            # A whitespace (or still-unspaced maqef) boundary starts a new
            # token, so the prefix chain restarts after it.
            all_prefixes_so_far = True
            continue
        if strip_pointing(seg.text) not in prefixes:
            all_prefixes_so_far = False
        if seg.boundary == "split":
            kind = "prefix" if all_prefixes_so_far else "suffix"
            segments[i] = replace(seg, boundary=kind)
    return SegmentedWord(tuple(segments))


def merge_suffixes(word: SegmentedWord) -> SegmentedWord:
    """Join every suffix segment into its host, keeping the break offset."""
    merged: list[Segment] = []
    for seg in word.segments:
        if merged and merged[-1].boundary == "suffix":
            host = merged.pop()
            merged.append(
                Segment(
                    text=host.text + seg.text,
                    boundary=seg.boundary,
                    suffix_breaks=host.suffix_breaks
                    + (len(host.text),)
                    + tuple(len(host.text) + o for o in seg.suffix_breaks),
                )
            )
        else:
            merged.append(seg)
    return SegmentedWord(tuple(merged))


def split_at_spaces(word: SegmentedWord) -> list[SegmentedWord]:
    """Break a word cluster at whitespace boundaries into single tokens."""
    out: list[SegmentedWord] = []
    current: list[Segment] = []
    for seg in word.segments:
        if seg.boundary == "space":
            current.append(replace(seg, boundary="none"))
            out.append(SegmentedWord(tuple(current)))
            current = []
        else:
            current.append(seg)
    if current:
        out.append(SegmentedWord(tuple(current)))
    return out


def letter_subtokens(word: SegmentedWord, word_index: int) -> list[tuple[TokenId, str]]:
    """Assign token IDs to one token's segments.

    A single-segment word keeps a bare numeric ID; multi-segment words
    get letters ``a``, ``b``, ... in order.
    """
    if any(seg.boundary == "space" for seg in word.segments):
        raise ValueError("split the word at whitespace boundaries before assigning IDs")
    if len(word.segments) > 26:
        raise TooManySubtokens(f"{len(word.segments)} segments will not fit a-z")
    if len(word.segments) == 1:
        return [(TokenId(word_index), word.segments[0].text)]
    return [
        (TokenId(word_index, chr(ord("a") + i)), seg.text)
        for i, seg in enumerate(word.segments)
    ]


def normalize(word: SegmentedWord, prefixes: frozenset[str] = DEFAULT_PREFIXES) -> SegmentedWord:
    """The full harmonization pipeline for one segmentation."""
    return merge_suffixes(classify_split(insert_maqef_space(word), prefixes))


# --- pairwise harmonization --------------------------------------------------


def _boundary_offsets(word: SegmentedWord) -> dict[int, str]:
    """Map consonant offsets (pointing stripped) to boundary kinds."""
    offsets: dict[int, str] = {}
    consumed = 0
    for seg in word.segments[:-1]:
        consumed += len(strip_pointing(seg.text))
        offsets[consumed] = seg.boundary
    # Merged suffix annotations participate like explicit boundaries.
    consumed = 0
    for seg in word.segments:
        base = consumed
        for br in seg.suffix_breaks:
            offsets[base + len(strip_pointing(seg.text[:br]))] = "suffix"
        consumed += len(strip_pointing(seg.text))
    return offsets


def _split_at_offsets(text: str, offsets: Sequence[int], kinds: Sequence[str]) -> SegmentedWord:
    """Cut pointed text after the given consonant counts."""
    segments: list[Segment] = []
    start = 0
    consonants = 0
    pending: list[tuple[int, str]] = sorted(zip(offsets, kinds))
    for i, ch in enumerate(text):
        if not _POINTING_RE.match(ch):
            consonants += 1
        # Cut after the consonant's trailing marks.
        nxt = text[i + 1] if i + 1 < len(text) else ""
        if pending and consonants == pending[0][0] and (not nxt or not _POINTING_RE.match(nxt)):
            segments.append(Segment(text[start : i + 1], pending[0][1]))
            pending.pop(0)
            start = i + 1
    if start < len(text):
        segments.append(Segment(text[start:], "none"))
    elif segments:
        # Boundary fell on the word end; demote it to a plain end.
        segments[-1] = replace(segments[-1], boundary="none")
    return SegmentedWord(tuple(segments))


def _union_kind(a: Optional[str], b: Optional[str]) -> str:
    if a == b and a is not None:
        return a
    present = [k for k in (a, b) if k is not None]
    if "space" in present:
        return "space"
    if len(present) == 1:
        return present[0]
    # Marker disagreement: leave the kind open for classification.
    return "split"


def harmonize(
    a: SegmentedWord,
    b: SegmentedWord,
    ref: VerseRef,
    word: int,
    prefixes: frozenset[str] = DEFAULT_PREFIXES,
    a_analyses: Optional[int] = None,
    b_analyses: Optional[int] = None,
) -> tuple[SegmentedWord, list[Discrepancy]]:
    """Unify two segmentations of the same word and report every disagreement.

    The union of the two boundary sets wins (the richer segmentation
    contributes its splits); disagreements about a boundary's marker are
    settled by prefix classification; suffix boundaries are merged away
    last. Raises :class:`TextMismatch` when the letters differ.
    """
    skel_a, skel_b = a.skeleton(), b.skeleton()
    if skel_a != skel_b:
        raise TextMismatch(f"{ref.render()} word {word}: {skel_a!r} differs from {skel_b!r}")

    bounds_a, bounds_b = _boundary_offsets(a), _boundary_offsets(b)
    union = sorted(set(bounds_a) | set(bounds_b))
    kinds = [_union_kind(bounds_a.get(off), bounds_b.get(off)) for off in union]

    # More boundaries = richer segmentation; its pointed text carries over.
    if len(bounds_a) != len(bounds_b):
        base = a if len(bounds_a) > len(bounds_b) else b
    else:
        base = a if a.text() <= b.text() else b
    raw = _split_at_offsets(base.text(), union, kinds)
    classified = classify_split(insert_maqef_space(raw), prefixes)
    unified = merge_suffixes(classified)

    final_kind: dict[int, str] = {}
    consumed = 0
    for seg in classified.segments[:-1]:
        consumed += len(strip_pointing(seg.text))
        final_kind[consumed] = seg.boundary

    discrepancies: list[Discrepancy] = []
    consonants = skel_a
    for off in union:
        ka, kb = bounds_a.get(off), bounds_b.get(off)
        if ka == kb:
            continue
        after_maqef = consonants[:off].endswith(MAQEF)
        resolved = final_kind.get(off, "space")
        if after_maqef or resolved == "space":
            layer, kind = 1, "maqef-space"
        elif resolved == "prefix":
            layer, kind = 2, "prefix-marker" if (ka and kb) else "missing-prefix-split"
        else:
            layer, kind = 3, "suffix-marker" if (ka and kb) else "suffix-split"
        where = f"after {consonants[:off]}"
        sides = f"{_describe(ka)} vs {_describe(kb)}"
        discrepancies.append(
            Discrepancy(layer, ref, word, kind, f"boundary {where}: {sides}")
        )

    for side, declared in (("first", a_analyses), ("second", b_analyses)):
        if declared is None:
            continue
        n_final = len(unified.segments)
        n_premerge = len(classified.segments)
        if declared == n_final:
            continue
        layer = 3 if declared == n_premerge else 2
        discrepancies.append(
            Discrepancy(
                layer,
                ref,
                word,
                "inconsistent-morphology",
                f"{side} input declares {declared} analyses for {n_final} subtokens",
            )
        )
    return unified, discrepancies


def _describe(kind: Optional[str]) -> str:
    return "absent" if kind is None else kind


# --- interchange files -------------------------------------------------------


@dataclass(frozen=True)
class InterchangeWord:
    ref: VerseRef
    word: int
    form: SegmentedWord
    analyses: Optional[int] = None


def parse_interchange(lines: Iterable[str]) -> list[InterchangeWord]:
    """Read ``verse<TAB>word<TAB>form[<TAB>analyses]`` lines."""
    from .formats import parse_verse_ref

    out: list[InterchangeWord] = []
    for n, raw in enumerate(lines, start=1):
        text = raw.rstrip("\n").rstrip("\r")
        if not text.strip() or text.startswith("#"):
            continue
        fields = text.split("\t")
        if len(fields) not in (3, 4):
            raise ValueError(f"line {n}: expected 3 or 4 tab-separated fields")
        ref = parse_verse_ref(fields[0])
        word = int(fields[1])
        form = parse_segmented(fields[2])
        analyses = int(fields[3]) if len(fields) == 4 and fields[3] else None
        out.append(InterchangeWord(ref=ref, word=word, form=form, analyses=analyses))
    return out


def harmonize_interchange(
    a: Sequence[InterchangeWord],
    b: Sequence[InterchangeWord],
    prefixes: frozenset[str] = DEFAULT_PREFIXES,
) -> tuple[list[InterchangeWord], list[Discrepancy]]:
    """Harmonize two whole interchange files, matched by (verse, word)."""
    index_b = {(w.ref, w.word): w for w in b}
    missing = [w for w in a if (w.ref, w.word) not in index_b]
    extra = {(w.ref, w.word) for w in b} - {(w.ref, w.word) for w in a}
    if missing or extra:
        raise TextMismatch(
            f"word lists differ: {len(missing)} only in the first input, {len(extra)} only in the second"
        )
    unified: list[InterchangeWord] = []
    reports: list[Discrepancy] = []
    for wa in a:
        wb = index_b[(wa.ref, wa.word)]
        merged, found = harmonize(
            wa.form,
            wb.form,
            wa.ref,
            wa.word,
            prefixes,
            a_analyses=wa.analyses,
            b_analyses=wb.analyses,
        )
        unified.append(InterchangeWord(ref=wa.ref, word=wa.word, form=merged))
        reports.extend(found)
    return unified, reports


def render_interchange(words: Sequence[InterchangeWord]) -> str:
    return "".join(f"{w.ref.render()}\t{w.word}\t{render_segmented(w.form)}\n" for w in words)


def render_discrepancies(discrepancies: Sequence[Discrepancy]) -> str:
    """Report TSV: layer, verse, word, kind, description."""
    return "".join(
        f"{d.layer}\t{d.ref.render()}\t{d.word}\t{d.kind}\t{d.description}\n" for d in discrepancies
    )


# --- edition comparison ------------------------------------------------------


@dataclass(frozen=True)
class EditionDelta:
    """One verse-level difference between two text editions."""

    kind: str  # "missing-in-a" | "missing-in-b" | "surface-differs"
    ref: VerseRef
    detail: str = ""


def edition_diff(a, b) -> list[EditionDelta]:
    """Compare two corpora (or verse maps) verse by verse.

    Reports verses present in exactly one edition and verses whose
    surface text differs. Trailing-space markers are ignored: only the
    word forms themselves are compared.
    """
    map_a = a.verses if hasattr(a, "verses") else a
    map_b = b.verses if hasattr(b, "verses") else b
    book_order = getattr(a, "book_order", None) or getattr(b, "book_order", None)
    deltas: list[EditionDelta] = []
    for ref in set(map_a) | set(map_b):
        if ref not in map_b:
            deltas.append(EditionDelta("missing-in-b", ref))
            continue
        if ref not in map_a:
            deltas.append(EditionDelta("missing-in-a", ref))
            continue
        va, vb = map_a[ref], map_b[ref]
        sides = []
        if tuple(t.surface for t in va.source) != tuple(t.surface for t in vb.source):
            sides.append("source")
        if tuple(t.surface for t in va.target) != tuple(t.surface for t in vb.target):
            sides.append("target")
        if sides:
            deltas.append(EditionDelta("surface-differs", ref, detail="+".join(sides)))
    if book_order:
        deltas.sort(key=lambda d: d.ref.sort_key(book_order))
    else:
        deltas.sort(key=lambda d: d.ref.sort_key())
    return deltas


def render_edition_diff(deltas: Sequence[EditionDelta]) -> str:
    return "".join(f"{d.kind}\t{d.ref.render()}\t{d.detail}\n" for d in deltas)
