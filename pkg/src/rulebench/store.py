"""Durable review store for human-in-the-loop translation decisions.

Entries snapshot the full translation result so a reviewer can inspect the
losing candidates later. Persistence is a single-writer append log of JSON
lines in a local directory: every save appends the entry's latest state, a
reload replays the log (last version of an entry wins, creation order is
first-appearance order), and compaction rewrites the log with one line per
entry. Review decisions follow the state machine
``pending -> {accepted, edited, rejected}`` with no way out of a terminal
state.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union
import json

from .formula import print_formula
from .parser import parse_formula
from .pipeline import TranslationCandidate, TranslationResult

__all__ = [
    "ReviewEntry",
    "ReviewStore",
    "StoreCorrupt",
    "IllegalTransition",
    "apply_review_decision",
    "entry_to_dict",
    "entry_from_dict",
    "utc_now_iso",
]

PENDING = "pending"
ACCEPTED = "accepted"
EDITED = "edited"
REJECTED = "rejected"
STATUSES = (PENDING, ACCEPTED, EDITED, REJECTED)
TERMINAL = frozenset({ACCEPTED, EDITED, REJECTED})


class StoreCorrupt(Exception):
    """A persisted record could not be read back; carries its location."""

    def __init__(self, location: str, reason: str):
        self.location = location
        self.reason = reason
        super().__init__(f"{location}: {reason}")


class IllegalTransition(Exception):
    """A review decision that the status state machine forbids."""


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True, slots=True)
class ReviewEntry:
    review_id: str
    rule_id: str
    submitted_text: str
    result: TranslationResult
    status: str
    final_mtl: Optional[str] = None
    reviewer_note: Optional[str] = None
    created: str = ""
    updated: str = ""

    def validate(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown review status: {self.status!r}")
        if self.status in (ACCEPTED, EDITED):
            if self.final_mtl is None:
                raise ValueError(f"status {self.status!r} requires final_mtl")
            final = parse_formula(self.final_mtl)
            if self.status == EDITED:
                winner = self.result.winner
                if winner is not None and final == winner.formula:
                    raise ValueError("edited final_mtl must differ from the winner's formula")
        elif self.final_mtl is not None:
            raise ValueError(f"status {self.status!r} must not carry final_mtl")


def apply_review_decision(
    entry: ReviewEntry,
    status: str,
    final_mtl: Optional[str] = None,
    note: Optional[str] = None,
    now: Optional[str] = None,
) -> ReviewEntry:
    """Next state of ``entry`` for a reviewer decision, or an exception.

    Raises :class:`IllegalTransition` for moves the state machine forbids,
    ``ParseError`` for an unparseable final_mtl, and ``ValueError`` for
    payloads inconsistent with the requested status.
    """

    if status not in STATUSES:
        raise ValueError(f"unknown review status: {status!r}")
    if status == PENDING:
        raise IllegalTransition("entries cannot be moved back to pending")
    if entry.status in TERMINAL:
        raise IllegalTransition(
            f"entry is already {entry.status}; terminal states cannot change"
        )

    winner = entry.result.winner
    if status == ACCEPTED:
        if winner is None:
            raise ValueError("cannot accept: the translation has no winning formula")
        winner_text = print_formula(winner.formula)
        if final_mtl is None:
            final_mtl = winner_text
        elif parse_formula(final_mtl) != winner.formula:
            raise ValueError("accepted final_mtl differs from the winner; use status 'edited'")
        else:
            final_mtl = print_formula(parse_formula(final_mtl))
    elif status == EDITED:
        if final_mtl is None:
            raise ValueError("status 'edited' requires final_mtl")
        final = parse_formula(final_mtl)
        if winner is not None and final == winner.formula:
            raise ValueError("edited final_mtl matches the winner; use status 'accepted'")
    else:  # rejected
        if final_mtl is not None:
            raise ValueError("status 'rejected' must not carry final_mtl")

    updated = replace(
        entry,
        status=status,
        final_mtl=final_mtl,
        reviewer_note=note if note is not None else entry.reviewer_note,
        updated=now if now is not None else utc_now_iso(),
    )
    updated.validate()
    return updated


# --- serialization ----------------------------------------------------------


def _candidate_to_dict(c: TranslationCandidate) -> dict:
    return {
        "sample_index": c.sample_index,
        "raw_output": c.raw_output,
        "formula": print_formula(c.formula) if c.formula is not None else None,
        "canonical": print_formula(c.canonical) if c.canonical is not None else None,
        "proposition_map": [[frag, prop] for frag, prop in c.proposition_map],
        "vocab_violations": [[name, arity] for name, arity in c.vocab_violations],
        "parse_error": c.parse_error,
    }


def _candidate_from_dict(doc: dict) -> TranslationCandidate:
    return TranslationCandidate(
        sample_index=doc["sample_index"],
        raw_output=doc["raw_output"],
        formula=parse_formula(doc["formula"]) if doc.get("formula") else None,
        canonical=parse_formula(doc["canonical"]) if doc.get("canonical") else None,
        proposition_map=tuple((f, p) for f, p in doc.get("proposition_map", ())),
        vocab_violations=tuple((n, a) for n, a in doc.get("vocab_violations", ())),
        parse_error=doc.get("parse_error"),
    )


def result_to_dict(result: TranslationResult) -> dict:
    return {
        "rule_text": result.rule_text,
        "rule_id": result.rule_id,
        "candidates": [_candidate_to_dict(c) for c in result.candidates],
        "winner_index": result.winner_index,
        "vote_tally": dict(result.vote_tally),
    }


def result_from_dict(doc: dict) -> TranslationResult:
    return TranslationResult(
        rule_text=doc["rule_text"],
        rule_id=doc["rule_id"],
        candidates=tuple(_candidate_from_dict(c) for c in doc["candidates"]),
        winner_index=doc["winner_index"],
        vote_tally=dict(doc["vote_tally"]),
    )


def entry_to_dict(entry: ReviewEntry) -> dict:
    return {
        "review_id": entry.review_id,
        "rule_id": entry.rule_id,
        "submitted_text": entry.submitted_text,
        "result": result_to_dict(entry.result),
        "status": entry.status,
        "final_mtl": entry.final_mtl,
        "reviewer_note": entry.reviewer_note,
        "created": entry.created,
        "updated": entry.updated,
    }


def entry_from_dict(doc: dict) -> ReviewEntry:
    return ReviewEntry(
        review_id=doc["review_id"],
        rule_id=doc["rule_id"],
        submitted_text=doc["submitted_text"],
        result=result_from_dict(doc["result"]),
        status=doc["status"],
        final_mtl=doc.get("final_mtl"),
        reviewer_note=doc.get("reviewer_note"),
        created=doc["created"],
        updated=doc["updated"],
    )


class ReviewStore:
    """Append-log persistence for review entries, safe under concurrent use."""

    LOG_NAME = "reviews.jsonl"

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.log_path = self.directory / self.LOG_NAME
        self._lock = threading.Lock()
        self._entries: dict[str, ReviewEntry] = {}
        self._order: list[str] = []
        self._log_lines = 0
        self._replay()

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        for lineno, line in enumerate(
            self.log_path.read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not line.strip():
                continue
            location = f"{self.log_path}:{lineno}"
            try:
                doc = json.loads(line)
                entry = entry_from_dict(doc)
                entry.validate()
            except StoreCorrupt:
                raise
            except Exception as exc:
                raise StoreCorrupt(location, f"unreadable review record: {exc}") from exc
            if entry.review_id not in self._entries:
                self._order.append(entry.review_id)
            self._entries[entry.review_id] = entry
            self._log_lines = lineno

    def save(self, entry: ReviewEntry) -> None:
        """Validate and durably append the entry's current state."""

        entry.validate()
        line = json.dumps(entry_to_dict(entry), sort_keys=True)
        with self._lock:
            with self.log_path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
            if entry.review_id not in self._entries:
                self._order.append(entry.review_id)
            self._entries[entry.review_id] = entry
            self._log_lines += 1

    def get(self, review_id: str) -> ReviewEntry:
        with self._lock:
            return self._entries[review_id]

    def load_all(self, status: Optional[str] = None) -> list[ReviewEntry]:
        """Entries in creation order, optionally filtered by status."""

        with self._lock:
            entries = [self._entries[rid] for rid in self._order]
        if status is not None:
            entries = [e for e in entries if e.status == status]
        return entries

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def compact(self) -> None:
        """Rewrite the log with exactly one line per entry."""

        with self._lock:
            tmp = self.log_path.with_suffix(".tmp")
            with tmp.open("w", encoding="utf-8") as fh:
                for rid in self._order:
                    fh.write(json.dumps(entry_to_dict(self._entries[rid]), sort_keys=True) + "\n")
            tmp.replace(self.log_path)
            self._log_lines = len(self._order)
