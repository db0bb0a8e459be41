"""Command-line entry point.

One binary, subcommands for batch work (validate, concord, sync, diff,
stats, convert) and for hosting the editor service (serve). Exit codes:
0 success, 1 domain failure (validation errors, mismatched inputs,
port in use), 2 usage or I/O problems.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

import click

from . import concord as concord_mod
from . import toksync
from .books import DEFAULT_BOOK_ORDER, load_book_order
from .formats import (
    DEFAULT_PROFILE,
    LENIENT_PROFILE,
    FormatProfile,
    load_corpus_path,
    load_profile,
    parse_corpus,
    serialize_corpus,
)
from .model import DEFAULT_EXTRACTORS, CoverageStats, coverage_stats
from .service import AlignmentStore, create_app
from .validate import (
    DEFAULT_CONFIG,
    ValidationConfig,
    load_rule_config,
    render_report,
    render_tsv,
    validate_corpus,
)


def _fail(message: str, code: int) -> None:
    click.echo(message, err=True)
    sys.exit(code)


def _read_profile(path: Optional[str], lenient: bool) -> FormatProfile:
    try:
        profile = load_profile(path) if path else DEFAULT_PROFILE
    except (OSError, ValueError) as exc:
        _fail(f"cannot read profile: {exc}", 2)
    return replace(profile, lenient=True) if lenient else profile


def _read_rules(path: Optional[str]) -> ValidationConfig:
    try:
        return load_rule_config(path) if path else DEFAULT_CONFIG
    except (OSError, ValueError) as exc:
        _fail(f"cannot read rule config: {exc}", 2)


def _read_books(path: Optional[str]) -> tuple[str, ...]:
    try:
        return load_book_order(path) if path else DEFAULT_BOOK_ORDER
    except OSError as exc:
        _fail(f"cannot read book order: {exc}", 2)


def _read_extractors(path: Optional[str]) -> tuple[str, ...]:
    if not path:
        return DEFAULT_EXTRACTORS
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        _fail(f"cannot read extractor inventory: {exc}", 2)
    return tuple(l.strip() for l in lines if l.strip() and not l.lstrip().startswith("#"))


def _load(path: str, profile: FormatProfile, books, extractors):
    try:
        if path == "-":
            return parse_corpus(sys.stdin, profile, book_order=books, extractors=extractors)
        return load_corpus_path(path, profile, book_order=books, extractors=extractors)
    except OSError as exc:
        _fail(f"cannot read {path}: {exc}", 2)


def common_options(f):
    f = click.option("--profile", "profile_path", envvar="HELFI_PROFILE", default=None, help="Format profile file (key=value).")(f)
    f = click.option("--books", "books_path", envvar="HELFI_BOOKS", default=None, help="Book order file, one code per line.")(f)
    f = click.option("--extractors", "extractors_path", envvar="HELFI_EXTRACTORS", default=None, help="Extractor inventory file, one kind per line.")(f)
    f = click.option("--lenient", is_flag=True, help="Parse leniently regardless of the profile.")(f)
    return f


@click.group()
@click.version_option(package_name="helfi-align")
def main() -> None:
    """Morpheme-alignment corpus tools."""


@main.command()
@click.argument("input", type=click.Path(allow_dash=True))
@click.option("--rules", "rules_path", envvar="HELFI_RULES", default=None, help="Rule severity config (R4=error, R7=off, ...).")
@click.option("--format", "fmt", type=click.Choice(["text", "tsv"]), default="text", help="Report format.")
@common_options
def validate(input: str, rules_path, fmt, profile_path, books_path, extractors_path, lenient) -> None:
    """Check a corpus against the alignment guidelines."""
    profile = _read_profile(profile_path, lenient)
    config = _read_rules(rules_path)
    books = _read_books(books_path)
    extractors = _read_extractors(extractors_path)
    corpus, parse_diags = _load(input, profile, books, extractors)
    summary = validate_corpus(corpus, config)
    diagnostics = parse_diags + summary.diagnostics
    if fmt == "tsv":
        click.echo(render_tsv(diagnostics), nl=False)
    else:
        click.echo(render_report(summary), nl=False)
        for d in parse_diags:
            click.echo(d.render())
    errors = [d for d in diagnostics if d.severity == "error"]
    click.echo(f"{len(errors)} errors", err=True)
    sys.exit(1 if errors else 0)


@main.command()
@click.argument("input", type=click.Path(allow_dash=True))
@click.option("--headword", default=None, help="Render a single headword entry.")
@click.option("--kwic-width", default=72, show_default=True, help="Width of the keyword-in-context window.")
@click.option("--format", "fmt", type=click.Choice(["text", "tsv", "json"]), default="text", help="Output format.")
@common_options
def concord(input: str, headword, kwic_width, fmt, profile_path, books_path, extractors_path, lenient) -> None:
    """Build the analytical concordance."""
    profile = _read_profile(profile_path, lenient)
    books = _read_books(books_path)
    extractors = _read_extractors(extractors_path)
    corpus, _ = _load(input, profile, books, extractors)
    try:
        index = concord_mod.build_index(corpus)
    except Exception as exc:
        _fail(f"cannot build index: {exc}", 1)
    entries = concord_mod.headword_entries(index)
    appendix = concord_mod.periphery_appendix(corpus)
    if headword is not None:
        entries = [e for e in entries if e.headword == headword]
        appendix = None
        if not entries:
            _fail(f"no headword {headword!r}", 1)
    layout = concord_mod.ConcordanceLayout(kwic_width=kwic_width)
    if fmt == "json":
        click.echo(concord_mod.render_json(entries, appendix), nl=False)
    elif fmt == "tsv":
        click.echo(concord_mod.render_tsv(entries, layout), nl=False)
    else:
        click.echo(concord_mod.render_printable(entries, layout, appendix), nl=False)


@main.command()
@click.argument("input_a", type=click.Path(allow_dash=False))
@click.argument("input_b", type=click.Path())
@click.option("--report", "report_path", default=None, help="Write the discrepancy TSV here instead of stdout.")
@click.option("--prefixes", "prefixes_path", default=None, help="Prefix inventory file, one form per line.")
def sync(input_a: str, input_b: str, report_path, prefixes_path) -> None:
    """Harmonize two segmentations of the same text."""
    prefixes = toksync.DEFAULT_PREFIXES
    if prefixes_path:
        try:
            lines = Path(prefixes_path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            _fail(f"cannot read prefixes: {exc}", 2)
        prefixes = frozenset(l.strip() for l in lines if l.strip())
    try:
        words_a = toksync.parse_interchange(open(input_a, encoding="utf-8"))
        words_b = toksync.parse_interchange(open(input_b, encoding="utf-8"))
    except OSError as exc:
        _fail(f"cannot read input: {exc}", 2)
    except ValueError as exc:
        _fail(f"bad interchange input: {exc}", 1)
    try:
        unified, discrepancies = toksync.harmonize_interchange(words_a, words_b, prefixes)
    except toksync.TextMismatch as exc:
        _fail(f"text mismatch: {exc}", 1)
    click.echo(toksync.render_interchange(unified), nl=False)
    report = toksync.render_discrepancies(discrepancies)
    if report_path:
        Path(report_path).write_text(report, encoding="utf-8")
    else:
        click.echo(report, nl=False, err=False)


@main.command()
@click.argument("edition_a", type=click.Path())
@click.argument("edition_b", type=click.Path())
@common_options
def diff(edition_a: str, edition_b: str, profile_path, books_path, extractors_path, lenient) -> None:
    """Report verse-level differences between two editions."""
    profile = _read_profile(profile_path, lenient)
    books = _read_books(books_path)
    extractors = _read_extractors(extractors_path)
    corpus_a, _ = _load(edition_a, profile, books, extractors)
    corpus_b, _ = _load(edition_b, profile, books, extractors)
    deltas = toksync.edition_diff(corpus_a, corpus_b)
    click.echo(toksync.render_edition_diff(deltas), nl=False)


@main.command()
@click.argument("input", type=click.Path(allow_dash=True))
@common_options
def stats(input: str, profile_path, books_path, extractors_path, lenient) -> None:
    """Per-book token and link coverage table."""
    profile = _read_profile(profile_path, lenient)
    books = _read_books(books_path)
    extractors = _read_extractors(extractors_path)
    corpus, _ = _load(input, profile, books, extractors)
    header = ("book", "verses", "source", "target", "core", "aux", "nosrc", "extr", "unlinked")
    click.echo("\t".join(header))
    totals = [0] * 8
    for book in corpus.books():
        refs = [r for r in corpus.refs_in_order() if r.book == book]
        verses = [corpus.verses[r] for r in refs]
        cov = sum((coverage_stats(v) for v in verses), start=CoverageStats())
        row = [
            len(verses),
            sum(len(v.source) for v in verses),
            sum(len(v.target) for v in verses),
            cov.core_linked,
            cov.aux_only,
            cov.no_source,
            cov.extractor_rows,
            cov.unlinked_source,
        ]
        totals = [a + b for a, b in zip(totals, row)]
        click.echo("\t".join([book] + [str(n) for n in row]))
    if corpus.books():
        click.echo("\t".join(["total"] + [str(n) for n in totals]))


@main.command()
@click.argument("input", type=click.Path())
@click.option("--port", default=8400, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static-dir", default=None, type=click.Path(), help="Serve the built editor UI from this directory.")
@click.option("--rules", "rules_path", envvar="HELFI_RULES", default=None)
@common_options
def serve(input: str, port, host, static_dir, rules_path, profile_path, books_path, extractors_path, lenient) -> None:
    """Host the alignment editing service."""
    import socket

    import uvicorn

    profile = _read_profile(profile_path, lenient)
    config = _read_rules(rules_path)
    books = _read_books(books_path)
    extractors = _read_extractors(extractors_path)
    corpus, diags = _load(input, profile, books, extractors)
    for d in diags:
        click.echo(d.render(), err=True)
    store = AlignmentStore(corpus, path=Path(input), profile=profile, config=config)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        probe.close()
        _fail(f"cannot bind {host}:{port}: {exc}", 1)
    probe.close()
    app = create_app(store, static_dir=Path(static_dir) if static_dir else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.argument("input", type=click.Path(allow_dash=True))
@click.option("--output", "-o", default=None, help="Output file (default stdout).")
@click.option("--canonicalize", is_flag=True, help="Emit verses in canonical order.")
@click.option("--in-profile", "in_profile_path", default=None, help="Profile for reading (defaults to a lenient reader).")
@common_options
def convert(input: str, output, canonicalize, in_profile_path, profile_path, books_path, extractors_path, lenient) -> None:
    """Reparse and rewrite a corpus file under a (possibly new) profile."""
    out_profile = _read_profile(profile_path, lenient)
    in_profile = _read_profile(in_profile_path, True) if in_profile_path else LENIENT_PROFILE
    books = _read_books(books_path)
    extractors = _read_extractors(extractors_path)
    corpus, diags = _load(input, in_profile, books, extractors)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        for d in errors:
            click.echo(d.render(), err=True)
        _fail(f"{len(errors)} errors while reading {input}", 1)
    text = serialize_corpus(corpus, out_profile, canonical_order=canonicalize)
    if output:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            _fail(f"cannot write {output}: {exc}", 2)
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
