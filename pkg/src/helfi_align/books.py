"""Canonical book ordering for verse references.

Book codes are short lowercase letter-only tags (2-5 chars). The default
inventory covers the 39-book Hebrew canon followed by the 27-book Greek
New Testament in conventional order. Numbered books use a trailing
ordinal letter (``sama`` = 1 Samuel, ``samb`` = 2 Samuel) because codes
may not contain digits. A deployment with different codes supplies its
own ordering file: one code per line, ``#`` comments allowed.
"""

from __future__ import annotations

from pathlib import Path

HEBREW_BOOKS = (
    "gen", "exo", "lev", "num", "deu",
    "jos", "jdg", "rut",
    "sama", "samb", "kgsa", "kgsb", "chra", "chrb",
    "ezr", "neh", "est",
    "job", "ps", "pro", "ecc", "sng",
    "isa", "jer", "lam", "ezk", "dan",
    "hos", "jol", "amo", "oba", "jon", "mic",
    "nah", "hab", "zep", "hag", "zec", "mal",
)

GREEK_BOOKS = (
    "mat", "mrk", "luk", "joh", "act",
    "rom", "cora", "corb", "gal", "eph", "phi", "col",
    "thesa", "thesb", "tima", "timb", "tit", "phm",
    "hb", "jas", "peta", "petb", "joha", "johb", "johc",
    "jud", "rev",
)

DEFAULT_BOOK_ORDER: tuple[str, ...] = HEBREW_BOOKS + GREEK_BOOKS


def book_position(book: str, order: tuple[str, ...] = DEFAULT_BOOK_ORDER) -> int:
    """Position of a book code in the ordering; unknown codes sort last."""
    try:
        return order.index(book)
    except ValueError:
        return len(order)


def load_book_order(path: str | Path) -> tuple[str, ...]:
    """Read a book ordering file: one lowercase code per line."""
    codes = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        codes.append(line)
    return tuple(codes)
