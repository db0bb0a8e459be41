"""Alignment editing back end: snapshots, revisioned edits, undo, search.

The store keeps the whole corpus as an immutable snapshot plus a
monotonically increasing revision counter. Edit batches are optimistic:
a client submits the revision it based its edits on and gets a conflict
if the corpus moved underneath it. A batch applies atomically — either
every edit lands and the revision ticks once, or the snapshot is
untouched. Each applied batch pushes its exact inverse onto the
session's undo stack, so undo restores byte-identical serialization.

The HTTP layer is a thin JSON mapping over the store; field names
mirror the model's field names.
"""

from __future__ import annotations

import os
import tempfile
import threading
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal, Optional, Sequence

from .concord import HeadwordEntry, build_index, headword_entries, kwic_line
from .formats import (
    DEFAULT_PROFILE,
    Diagnostic,
    FormatProfile,
    parse_token_id,
    serialize_corpus,
    serialize_verse,
)
from .model import (
    Corpus,
    LinkField,
    LinkRef,
    SourceToken,
    TargetLemma,
    TargetToken,
    TokenId,
    VerseAlignment,
    VerseRef,
)
from .validate import DEFAULT_CONFIG, ValidationConfig, validate_corpus, validate_verse


class ServiceError(Exception):
    code = "service_error"


class UnknownVerse(ServiceError):
    code = "unknown_verse"


class BadRequest(ServiceError):
    code = "bad_request"


class UnknownSession(ServiceError):
    code = "unknown_session"


class RevisionConflict(ServiceError):
    code = "revision_conflict"

    def __init__(self, message: str, current_revision: int):
        super().__init__(message)
        self.current_revision = current_revision


class InvariantViolation(ServiceError):
    code = "invariant_violation"

    def __init__(self, rule: str, message: str, diagnostics: Sequence[Diagnostic] = ()):
        super().__init__(message)
        self.rule = rule
        self.diagnostics = list(diagnostics)


class NothingToUndo(ServiceError):
    code = "nothing_to_undo"


class NothingToRedo(ServiceError):
    code = "nothing_to_redo"


class ValidationFailed(ServiceError):
    code = "validation_failed"

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        super().__init__(f"{len(diagnostics)} error diagnostics")
        self.diagnostics = list(diagnostics)


EditOp = Literal["add_link", "remove_link", "set_link_kind", "set_target_lemma", "set_no_source"]


@dataclass(frozen=True)
class Edit:
    """One reversible change to a target row.

    ``index`` pins the position a link is (re)inserted at, which is how
    inverse edits restore the original link order exactly.
    """

    op: EditOp
    position: int
    token: Optional[TokenId] = None
    kind: str = "core"
    lemma: Optional[TargetLemma] = None
    index: Optional[int] = None
    verse_offset: int = 0

    @classmethod
    def add_link(cls, position: int, token: TokenId, kind: str = "core", index: Optional[int] = None, verse_offset: int = 0) -> "Edit":
        return cls(op="add_link", position=position, token=token, kind=kind, index=index, verse_offset=verse_offset)

    @classmethod
    def remove_link(cls, position: int, token: TokenId, verse_offset: int = 0) -> "Edit":
        return cls(op="remove_link", position=position, token=token, verse_offset=verse_offset)

    @classmethod
    def set_link_kind(cls, position: int, token: TokenId, kind: str, verse_offset: int = 0) -> "Edit":
        return cls(op="set_link_kind", position=position, token=token, kind=kind, verse_offset=verse_offset)

    @classmethod
    def set_target_lemma(cls, position: int, lemma: TargetLemma) -> "Edit":
        return cls(op="set_target_lemma", position=position, lemma=lemma)

    @classmethod
    def set_no_source(cls, position: int) -> "Edit":
        return cls(op="set_no_source", position=position)


def _apply_edit(verse: VerseAlignment, edit: Edit) -> tuple[VerseAlignment, list[Edit]]:
    """Apply one edit, returning the new verse and the inverse edits."""
    if not (0 <= edit.position < len(verse.target)):
        raise InvariantViolation("edit-position", f"no target row {edit.position}")
    row = verse.target[edit.position]

    def with_row(new_row: TargetToken) -> VerseAlignment:
        rows = list(verse.target)
        rows[edit.position] = new_row
        return replace(verse, target=tuple(rows))

    if edit.op == "add_link":
        assert edit.token is not None
        refs = list(row.links.refs or ())
        if any(r.target == edit.token and r.verse_offset == edit.verse_offset for r in refs):
            raise InvariantViolation("duplicate-link", f"row {edit.position} already links {edit.token.render()}")
        new_ref = LinkRef(target=edit.token, kind=edit.kind, verse_offset=edit.verse_offset)  # type: ignore[arg-type]
        at = len(refs) if edit.index is None else min(max(edit.index, 0), len(refs))
        refs.insert(at, new_ref)
        inverse = [Edit.remove_link(edit.position, edit.token, edit.verse_offset)]
        if row.links.is_no_source:
            inverse = [Edit.set_no_source(edit.position)]
        return with_row(replace(row, links=LinkField.of(refs))), inverse

    if edit.op == "remove_link":
        refs = list(row.links.refs or ())
        hit = next(
            (i for i, r in enumerate(refs) if r.target == edit.token and r.verse_offset == edit.verse_offset),
            None,
        )
        if hit is None:
            raise InvariantViolation("missing-link", f"row {edit.position} has no link to {edit.token.render() if edit.token else '?'}")
        removed = refs.pop(hit)
        links = LinkField.of(refs) if refs else LinkField.no_source()
        inverse = [Edit.add_link(edit.position, removed.target, removed.kind, index=hit, verse_offset=removed.verse_offset)]
        return with_row(replace(row, links=links)), inverse

    if edit.op == "set_link_kind":
        refs = list(row.links.refs or ())
        hit = next(
            (i for i, r in enumerate(refs) if r.target == edit.token and r.verse_offset == edit.verse_offset),
            None,
        )
        if hit is None:
            raise InvariantViolation("missing-link", f"row {edit.position} has no link to {edit.token.render() if edit.token else '?'}")
        old = refs[hit]
        refs[hit] = replace(old, kind=edit.kind)  # type: ignore[arg-type]
        inverse = [Edit.set_link_kind(edit.position, old.target, old.kind, old.verse_offset)]
        return with_row(replace(row, links=LinkField.of(refs))), inverse

    if edit.op == "set_target_lemma":
        assert edit.lemma is not None
        inverse = [Edit.set_target_lemma(edit.position, row.lemma)]
        return with_row(replace(row, lemma=edit.lemma)), inverse

    if edit.op == "set_no_source":
        inverse = [
            Edit.add_link(edit.position, r.target, r.kind, index=i, verse_offset=r.verse_offset)
            for i, r in enumerate(row.links.refs or ())
        ]
        if not inverse:
            inverse = [Edit.set_no_source(edit.position)]
        return with_row(replace(row, links=LinkField.no_source())), inverse

    raise InvariantViolation("unknown-op", f"unknown edit op {edit.op!r}")


@dataclass
class _UndoEntry:
    ref: VerseRef
    inverse: tuple[Edit, ...]
    forward: tuple[Edit, ...]


@dataclass
class Session:
    """Per-annotator undo/redo state."""

    id: str
    undo: list[_UndoEntry] = field(default_factory=list)
    redo: list[_UndoEntry] = field(default_factory=list)


class AlignmentStore:
    """Revisioned corpus snapshots plus the edit/undo machinery.

    Concurrent readers share snapshots freely; every mutation funnels
    through one lock, so revisions observe a single total order.
    """

    def __init__(
        self,
        corpus: Corpus,
        path: Optional[Path] = None,
        profile: FormatProfile = DEFAULT_PROFILE,
        config: ValidationConfig = DEFAULT_CONFIG,
    ):
        self.corpus = corpus
        self.path = Path(path) if path else None
        self.profile = profile
        self.config = config
        self.revision = 0
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._index_cache: Optional[tuple[int, dict]] = None

    # -- reading ------------------------------------------------------------

    def meta(self) -> dict:
        refs = self.corpus.refs_in_order()
        return {
            "label": self.corpus.label,
            "books": self.corpus.books(),
            "verse_count": len(self.corpus.verses),
            "extractors": list(self.corpus.extractors),
            "revision": self.revision,
            "first_ref": refs[0].render() if refs else None,
            "last_ref": refs[-1].render() if refs else None,
        }

    def get_verse(self, ref: VerseRef) -> tuple[VerseAlignment, int]:
        verse = self.corpus.verses.get(ref)
        if verse is None:
            raise UnknownVerse(f"no verse {ref.render()}")
        return verse, self.revision

    def navigate(self, ref: VerseRef, direction: str) -> VerseRef:
        """Adjacent verse in canonical order, clamped at the corpus ends."""
        refs = self.corpus.refs_in_order()
        if ref not in self.corpus.verses:
            raise UnknownVerse(f"no verse {ref.render()}")
        i = refs.index(ref)
        if direction == "next":
            i = min(i + 1, len(refs) - 1)
        elif direction == "prev":
            i = max(i - 1, 0)
        else:
            raise ValueError(f"direction must be next or prev, got {direction!r}")
        return refs[i]

    def neighbors(self, ref: VerseRef) -> dict:
        return {
            "prev": self.navigate(ref, "prev").render(),
            "next": self.navigate(ref, "next").render(),
        }

    def session(self, session_id: Optional[str] = None) -> Session:
        sid = session_id or str(uuid.uuid4())
        with self._lock:
            if sid not in self._sessions:
                self._sessions[sid] = Session(id=sid)
            return self._sessions[sid]

    # -- editing ------------------------------------------------------------

    def _check_verse(self, verse: VerseAlignment) -> None:
        for row in verse.target:
            if not row.is_extractor and not row.surface:
                raise InvariantViolation("F8-empty-surface", f"row {row.position} would have an empty word form")
            for link in row.links.refs or ():
                if link.verse_offset and not self.profile.lenient:
                    raise InvariantViolation(
                        "cross-verse", f"row {row.position}: cross-verse links need a lenient profile"
                    )
        diags = validate_verse(verse, self.config, extractors=self.corpus.extractors)
        errors = [d for d in diags if d.severity == "error"]
        if errors:
            raise InvariantViolation(errors[0].rule, errors[0].message, errors)

    def _apply_batch(self, ref: VerseRef, edits: Sequence[Edit]) -> tuple[Edit, ...]:
        """Apply edits to the named verse; returns the inverse batch.

        Caller holds the lock. Raises before any state change; the
        snapshot swap is the last step.
        """
        verse = self.corpus.verses.get(ref)
        if verse is None:
            raise UnknownVerse(f"no verse {ref.render()}")
        inverses: list[Edit] = []
        for edit in edits:
            verse, inverse = _apply_edit(verse, edit)
            inverses = inverse + inverses
        self._check_verse(verse)
        self.corpus = self.corpus.with_verse(verse)
        self.revision += 1
        self._index_cache = None
        return tuple(inverses)

    def apply_edits(self, session_id: str, ref: VerseRef, base_revision: int, edits: Sequence[Edit]) -> int:
        """Apply one optimistic batch; returns the new revision."""
        if not edits:
            raise InvariantViolation("empty-batch", "an edit batch must contain at least one edit")
        session = self.session(session_id)
        with self._lock:
            if base_revision != self.revision:
                raise RevisionConflict(
                    f"base revision {base_revision} is stale (current {self.revision})",
                    current_revision=self.revision,
                )
            inverse = self._apply_batch(ref, edits)
            session.undo.append(_UndoEntry(ref=ref, inverse=inverse, forward=tuple(edits)))
            session.redo.clear()
            return self.revision

    def undo(self, session_id: str) -> tuple[int, VerseRef]:
        session = self.session(session_id)
        with self._lock:
            if not session.undo:
                raise NothingToUndo("undo stack is empty")
            entry = session.undo.pop()
            redo_inverse = self._apply_batch(entry.ref, entry.inverse)
            session.redo.append(_UndoEntry(ref=entry.ref, inverse=redo_inverse, forward=entry.inverse))
            return self.revision, entry.ref

    def redo(self, session_id: str) -> tuple[int, VerseRef]:
        session = self.session(session_id)
        with self._lock:
            if not session.redo:
                raise NothingToRedo("redo stack is empty")
            entry = session.redo.pop()
            undo_inverse = self._apply_batch(entry.ref, entry.inverse)
            session.undo.append(_UndoEntry(ref=entry.ref, inverse=undo_inverse, forward=entry.inverse))
            return self.revision, entry.ref

    # -- validation, search, concordance -------------------------------------

    def validate(self, scope: Optional[str] = None):
        if scope and scope != "corpus":
            from .formats import parse_verse_ref

            try:
                ref = parse_verse_ref(scope)
            except ValueError as exc:
                raise BadRequest(f"scope must be 'corpus' or a verse reference: {exc}") from exc
            verse, _ = self.get_verse(ref)
            return validate_verse(verse, self.config, extractors=self.corpus.extractors)
        return validate_corpus(self.corpus, self.config)

    def search(self, query: str, kind: str = "lemma", scope: Optional[str] = None) -> list[dict]:
        """Exact-match token search; hits come back in canonical order."""
        if kind not in ("lemma", "surface", "strong"):
            raise BadRequest(f"search type must be lemma, surface, or strong, got {kind!r}")
        hits: list[dict] = []
        for ref in self.corpus.refs_in_order():
            if scope and ref.book != scope and ref.render() != scope:
                continue
            verse = self.corpus.verses[ref]
            for token in verse.source:
                if _source_matches(token, query, kind):
                    hits.append(
                        {
                            "ref": ref.render(),
                            "side": "source",
                            "token": token.id.render(),
                            "surface": token.surface,
                        }
                    )
            for row in verse.target:
                if _target_matches(row, query, kind):
                    hits.append(
                        {
                            "ref": ref.render(),
                            "side": "target",
                            "position": row.position,
                            "surface": row.surface,
                        }
                    )
        return hits

    def concordance_entries(self) -> list[HeadwordEntry]:
        if self._index_cache is None or self._index_cache[0] != self.revision:
            index = build_index(self.corpus)
            self._index_cache = (self.revision, index)
        return headword_entries(self._index_cache[1])

    def concordance_entry(self, headword: str) -> Optional[HeadwordEntry]:
        for entry in self.concordance_entries():
            if entry.headword == headword:
                return entry
        return None

    # -- persistence ----------------------------------------------------------

    def save(self, path: Optional[Path] = None, force: bool = False) -> Path:
        """Validate, then write atomically (temp file + rename).

        Refuses to write a corpus with error diagnostics unless forced.
        At any instant the target path holds either the complete old
        file or the complete new file.
        """
        target = Path(path) if path else self.path
        if target is None:
            raise ValueError("no save path configured")
        summary = validate_corpus(self.corpus, self.config)
        if summary.errors and not force:
            raise ValidationFailed(summary.errors)
        data = serialize_corpus(self.corpus, self.profile)
        fd, tmp_name = tempfile.mkstemp(dir=str(target.parent), prefix=target.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        return target


def _source_matches(token: SourceToken, query: str, kind: str) -> bool:
    if kind == "lemma":
        return token.lemma.lemma == query
    if kind == "surface":
        return token.surface == query
    if kind == "strong":
        return token.lemma.strong is not None and token.lemma.strong.matches(query)
    raise ValueError(f"unknown search type {kind!r}")


def _target_matches(row: TargetToken, query: str, kind: str) -> bool:
    if kind == "lemma":
        return row.lemma.kind in ("plain", "periphery") and row.lemma.value == query
    if kind == "surface":
        return bool(row.surface) and row.surface == query
    if kind == "strong":
        return False
    raise ValueError(f"unknown search type {kind!r}")


# --- JSON mapping -------------------------------------------------------------


def verse_to_json(verse: VerseAlignment, revision: int) -> dict:
    return {
        "ref": verse.ref.render(),
        "revision": revision,
        "source": [
            {
                "id": t.id.render(),
                "lemma": {
                    "lemma": t.lemma.lemma,
                    "strong": t.lemma.strong.render() if t.lemma.strong else None,
                    "concord": t.lemma.concord,
                },
                "morph": t.morph.render(),
                "surface": t.surface,
                "translit": t.translit,
            }
            for t in verse.source
        ],
        "target": [
            {
                "position": r.position,
                "links": None
                if r.links.is_no_source
                else [
                    {"target": ref.target.render(), "kind": ref.kind, "verse_offset": ref.verse_offset}
                    for ref in r.links.refs or ()
                ],
                "lemma": {"kind": r.lemma.kind, "value": r.lemma.value},
                "morph": r.morph.render(),
                "surface": r.surface,
                "trailing_space": r.trailing_space,
            }
            for r in verse.target
        ],
    }


def diagnostic_to_json(d: Diagnostic) -> dict:
    return {
        "severity": d.severity,
        "rule": d.rule,
        "message": d.message,
        "ref": d.ref.render() if d.ref else None,
        "line": d.line,
    }


def entry_to_json(entry: HeadwordEntry, kwic_width: int = 60) -> dict:
    return {
        "headword": entry.headword,
        "total": entry.total,
        "groups": [
            {
                "strong": g.strong.render() if g.strong else None,
                "count": g.count,
                "occurrences": [
                    {
                        "verse": occ.ref.render(),
                        "position": occ.position,
                        "strongs": [[c.render(), k] for c, k in occ.strongs],
                        "kwic": kwic_line(occ, kwic_width),
                    }
                    for occ in g.occurrences
                ],
            }
            for g in entry.groups
        ],
    }


def edit_from_json(spec: dict) -> Edit:
    op = spec.get("op")
    position = spec.get("position")
    if op not in ("add_link", "remove_link", "set_link_kind", "set_target_lemma", "set_no_source"):
        raise InvariantViolation("unknown-op", f"unknown edit op {op!r}")
    if not isinstance(position, int):
        raise InvariantViolation("edit-position", "edit needs an integer position")
    token = None
    if spec.get("token") is not None:
        token = parse_token_id(str(spec["token"]))
    lemma = None
    if spec.get("lemma") is not None:
        raw = spec["lemma"]
        kind = raw.get("kind")
        if kind not in ("plain", "periphery", "extractor", "none"):
            raise InvariantViolation("bad-lemma", f"unknown lemma kind {kind!r}")
        lemma = TargetLemma(kind=kind, value=raw.get("value", "") or "")
    return Edit(
        op=op,
        position=position,
        token=token,
        kind=spec.get("kind", "core"),
        lemma=lemma,
        index=spec.get("index"),
        verse_offset=int(spec.get("verse_offset", 0) or 0),
    )


# --- HTTP app -----------------------------------------------------------------


def create_app(store: AlignmentStore, static_dir: Optional[Path] = None):
    """Build the JSON-over-HTTP API consumed by the editor UI."""
    from fastapi import Body, FastAPI, Query
    from fastapi.responses import JSONResponse

    from .formats import parse_verse_ref
    from .validate import ValidationSummary

    app = FastAPI(title="alignment editor service")

    def fail(status: int, exc: ServiceError, **extra) -> JSONResponse:
        body = {"code": exc.code, "message": str(exc), **extra}
        if isinstance(exc, (InvariantViolation, ValidationFailed)):
            body["diagnostics"] = [diagnostic_to_json(d) for d in exc.diagnostics]
        if isinstance(exc, InvariantViolation):
            body["rule"] = exc.rule
        if isinstance(exc, RevisionConflict):
            body["current_revision"] = exc.current_revision
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(ServiceError)
    async def service_error_handler(_, exc: ServiceError):
        status = {
            "unknown_verse": 404,
            "unknown_session": 404,
            "bad_request": 400,
            "revision_conflict": 409,
            "invariant_violation": 422,
            "nothing_to_undo": 409,
            "nothing_to_redo": 409,
            "validation_failed": 409,
        }.get(exc.code, 400)
        return fail(status, exc)

    def resolve_ref(ref: str) -> VerseRef:
        try:
            return parse_verse_ref(ref)
        except ValueError as exc:
            raise UnknownVerse(str(exc)) from exc

    @app.get("/corpus/meta")
    def corpus_meta():
        return store.meta()

    @app.get("/verse/{ref}")
    def get_verse(ref: str):
        verse, revision = store.get_verse(resolve_ref(ref))
        return verse_to_json(verse, revision)

    @app.get("/verse/{ref}/neighbors")
    def get_neighbors(ref: str):
        return store.neighbors(resolve_ref(ref))

    @app.post("/verse/{ref}/edits")
    def post_edits(ref: str, payload: dict = Body(...)):
        base_revision = payload.get("base_revision")
        if not isinstance(base_revision, int):
            raise InvariantViolation("base-revision", "base_revision must be an integer")
        session_id = str(payload.get("session") or "default")
        edits = [edit_from_json(spec) for spec in payload.get("edits", [])]
        revision = store.apply_edits(session_id, resolve_ref(ref), base_revision, edits)
        return {"revision": revision}

    @app.post("/session/{session_id}/undo")
    def post_undo(session_id: str):
        revision, ref = store.undo(session_id)
        return {"revision": revision, "ref": ref.render()}

    @app.post("/session/{session_id}/redo")
    def post_redo(session_id: str):
        revision, ref = store.redo(session_id)
        return {"revision": revision, "ref": ref.render()}

    @app.get("/validate")
    def get_validate(scope: str = Query(default="corpus")):
        result = store.validate(scope)
        if isinstance(result, ValidationSummary):
            return {
                "diagnostics": [diagnostic_to_json(d) for d in result.diagnostics],
                "rule_counts": result.rule_counts,
                "errors": len(result.errors),
                "warnings": len(result.warnings),
                "verses": result.verses,
                "coverage": {
                    "core_linked": result.coverage.core_linked,
                    "aux_only": result.coverage.aux_only,
                    "no_source": result.coverage.no_source,
                    "extractor_rows": result.coverage.extractor_rows,
                    "unlinked_source": result.coverage.unlinked_source,
                },
            }
        return {"diagnostics": [diagnostic_to_json(d) for d in result]}

    @app.get("/search")
    def get_search(q: str, type: str = Query(default="lemma"), scope: Optional[str] = None):
        return {"hits": store.search(q, type, scope)}

    @app.get("/concordance/{headword}")
    def get_concordance(headword: str):
        entry = store.concordance_entry(headword)
        if entry is None:
            raise UnknownVerse(f"no headword {headword!r}")
        return entry_to_json(entry)

    @app.post("/save")
    def post_save(payload: Optional[dict] = Body(default=None)):
        payload = payload or {}
        path = payload.get("path")
        target = store.save(Path(path) if path else None, force=bool(payload.get("force")))
        return {"path": str(target)}

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
