from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helfi_align.formats import parse_corpus
from helfi_align.model import VerseRef

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def psalms_text() -> str:
    return (FIXTURES / "ps001.tsv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def hebrews_text() -> str:
    return (FIXTURES / "hb001.tsv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus_text() -> str:
    return (FIXTURES / "corpus.tsv").read_text(encoding="utf-8")


@pytest.fixture()
def corpus(corpus_text):
    parsed, diags = parse_corpus(corpus_text.splitlines(True))
    assert not diags
    return parsed


@pytest.fixture()
def ps_verse(corpus):
    return corpus.verses[VerseRef("ps", 1, 1)]


@pytest.fixture()
def hb_verse(corpus):
    return corpus.verses[VerseRef("hb", 1, 1)]
