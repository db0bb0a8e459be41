"""Morpheme-level bitext alignment toolkit.

Parses and writes the column-oriented alignment format, harmonizes
divergent Hebrew tokenizations, validates alignments against the
annotation guidelines, builds analytical concordances, and serves an
interactive alignment-editing API.
"""

from .books import DEFAULT_BOOK_ORDER, load_book_order
from .model import (
    DEFAULT_EXTRACTORS,
    AlignmentGroup,
    Corpus,
    CoverageStats,
    DanglingLink,
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
    alignment_groups,
    coverage_stats,
    detokenize_target,
    resolve_links,
)
from .formats import (
    DEFAULT_PROFILE,
    LENIENT_PROFILE,
    Diagnostic,
    FormatProfile,
    load_corpus_path,
    parse_corpus,
    parse_verse_block,
    serialize_corpus,
    serialize_verse,
)

__version__ = "0.1.0"
