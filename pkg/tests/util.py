"""Shared test helpers: random corpus builders and independent oracles."""

from __future__ import annotations

import random
from typing import Optional

from helfi_align.model import (
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

MORPHS = ["N", "V", "ADJ", "ADV", "SG", "PL", "NOM", "GEN", "3MS", "PERF"]
WORDS = ["kivi", "talo", "sana", "vesi", "maa", "valo", "tie", "puu", "meri", "ilma"]


def brute_force_groups(core_links: list[tuple[TokenId, int]]) -> set[tuple[frozenset, frozenset]]:
    """Transitive closure over the bipartite link graph by repeated merging.

    Deliberately not union-find: merge any two components sharing a
    node until nothing changes.
    """
    components: list[tuple[set, set]] = [({s}, {t}) for s, t in core_links]
    changed = True
    while changed:
        changed = False
        for i in range(len(components)):
            for j in range(i + 1, len(components)):
                si, ti = components[i]
                sj, tj = components[j]
                if si & sj or ti & tj:
                    components[i] = (si | sj, ti | tj)
                    del components[j]
                    changed = True
                    break
            if changed:
                break
    return {(frozenset(s), frozenset(t)) for s, t in components}


def make_source_token(tid: TokenId, rng: random.Random, particle: bool = False) -> SourceToken:
    if particle:
        strong: Optional[StrongCode] = StrongCode.particle(rng.choice("bdklmw"))
    else:
        strong = StrongCode.numeric(rng.randint(1, 9999))
    return SourceToken(
        id=tid,
        lemma=SourceLemma(strong=strong, concord=rng.randint(1, 9999)),
        morph=MorphTags((rng.choice(MORPHS), rng.choice(MORPHS))),
        surface=rng.choice(WORDS),
        translit=rng.choice(WORDS),
    )


def make_token_ids(rng: random.Random, n_words: int) -> list[TokenId]:
    ids: list[TokenId] = []
    word = 0
    while len(ids) < n_words:
        word += 1
        if rng.random() < 0.25:
            for sub in "abc"[: rng.randint(2, 3)]:
                ids.append(TokenId(word, sub))
        else:
            ids.append(TokenId(word))
    return ids[:n_words]


def make_random_verse(
    rng: random.Random,
    ref: Optional[VerseRef] = None,
    n_source: int = 8,
    n_target: int = 8,
) -> VerseAlignment:
    """A structurally valid random verse with random core/aux links."""
    ref = ref or VerseRef("gen", rng.randint(1, 50), rng.randint(1, 30))
    ids = make_token_ids(rng, n_source)
    source = tuple(make_source_token(t, rng, particle=rng.random() < 0.15) for t in ids)
    target = []
    for position in range(n_target):
        roll = rng.random()
        if roll < 0.12:
            links = LinkField.no_source()
            lemma = TargetLemma.periphery(rng.choice(WORDS))
        elif roll < 0.2:
            links = LinkField.of([LinkRef(rng.choice(ids), kind="core")])
            lemma = TargetLemma.extractor(rng.choice(["pers", "modus", "tasp", "case", "pro"]))
        else:
            n_links = rng.randint(1, 3)
            chosen = rng.sample(ids, min(n_links, len(ids)))
            links = LinkField.of(
                [LinkRef(t, kind="aux" if rng.random() < 0.3 else "core") for t in chosen]
            )
            lemma = TargetLemma.plain(rng.choice(WORDS))
        surface = "" if lemma.kind == "extractor" else rng.choice(WORDS)
        target.append(
            TargetToken(
                position=position,
                links=links,
                lemma=lemma,
                morph=MorphTags((rng.choice(MORPHS),)),
                surface=surface,
                trailing_space=bool(surface) and rng.random() < 0.8,
            )
        )
    return VerseAlignment(ref=ref, source=source, target=tuple(target))


def core_link_pairs(verse: VerseAlignment) -> list[tuple[TokenId, int]]:
    pairs = []
    for row in verse.target:
        for ref in row.links.refs or ():
            if ref.kind == "core" and ref.verse_offset == 0:
                pairs.append((ref.target, row.position))
    return pairs
