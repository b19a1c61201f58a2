"""Corpus ingestion and storage.

Posts come either from a JSONL file (one object per line with ``id``,
``thread_id``, ``user_id``, optional ISO-8601 ``timestamp``, and ``text``)
or from a directory of plain-text files whose names become post ids.
Malformed records are skipped and counted; a mostly-broken input is an
error rather than a silently tiny corpus."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataFormatError, UsageError

META_KEY = "__streetlex__"


@dataclass(frozen=True)
class Post:
    post_id: str
    text: str
    thread_id: str = ""
    user_id: str = ""
    timestamp: str | None = None


class Corpus:
    """An ordered collection of posts with unique ids."""

    def __init__(self, name: str, posts: Iterable[Post] = ()):
        self.name = name
        self._posts: list[Post] = []
        self._by_id: dict[str, Post] = {}
        for post in posts:
            self.add(post)

    def add(self, post: Post) -> None:
        if not post.post_id:
            raise ValueError("post_id must be non-empty")
        if post.post_id in self._by_id:
            raise ValueError(f"duplicate post_id: {post.post_id}")
        if not post.text.strip():
            raise ValueError(f"post {post.post_id} has empty text")
        self._posts.append(post)
        self._by_id[post.post_id] = post

    @property
    def doc_count(self) -> int:
        return len(self._posts)

    def get(self, post_id: str) -> Post:
        return self._by_id[post_id]

    def __contains__(self, post_id: str) -> bool:
        return post_id in self._by_id

    def __len__(self) -> int:
        return len(self._posts)

    def __iter__(self) -> Iterator[Post]:
        return iter(self._posts)


@dataclass
class IngestResult:
    corpus: Corpus
    skipped: int = 0
    reasons: dict[str, int] = field(default_factory=dict)


def _valid_timestamp(value: str) -> bool:
    try:
        datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        return False
    return True


def _post_from_record(record: dict) -> Post:
    post_id = record.get("id")
    text = record.get("text")
    if not isinstance(post_id, str) or not post_id:
        raise ValueError("missing id")
    if not isinstance(text, str) or not text.strip():
        raise ValueError("missing text")
    timestamp = record.get("timestamp")
    if timestamp is not None:
        if not isinstance(timestamp, str) or not _valid_timestamp(timestamp):
            raise ValueError("bad timestamp")
    return Post(
        post_id=post_id,
        text=text,
        thread_id=str(record.get("thread_id", "") or ""),
        user_id=str(record.get("user_id", "") or ""),
        timestamp=timestamp,
    )


def _ingest_jsonl(path: Path, result: IngestResult) -> None:
    with path.open("r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                result.skipped += 1
                result.reasons["bad json"] = result.reasons.get("bad json", 0) + 1
                continue
            if not isinstance(record, dict):
                result.skipped += 1
                result.reasons["not an object"] = result.reasons.get("not an object", 0) + 1
                continue
            if META_KEY in record:
                continue
            try:
                result.corpus.add(_post_from_record(record))
            except ValueError as exc:
                result.skipped += 1
                reason = str(exc)
                result.reasons[reason] = result.reasons.get(reason, 0) + 1


def _ingest_textdir(path: Path, result: IngestResult) -> None:
    for file in sorted(path.iterdir()):
        if not file.is_file():
            continue
        try:
            text = file.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError):
            result.skipped += 1
            result.reasons["unreadable file"] = result.reasons.get("unreadable file", 0) + 1
            continue
        if not text.strip():
            result.skipped += 1
            result.reasons["missing text"] = result.reasons.get("missing text", 0) + 1
            continue
        result.corpus.add(Post(post_id=file.name, text=text))


def ingest(path: str | Path, format: str = "jsonl", name: str | None = None) -> IngestResult:
    """Read a corpus from disk, skipping and counting malformed records.

    Raises DataFormatError when more than half of the records are bad, and
    UsageError when the path cannot be read at all."""
    path = Path(path)
    if format not in ("jsonl", "textdir"):
        raise UsageError(f"unknown corpus format: {format}")
    if not path.exists():
        raise UsageError(f"corpus path does not exist: {path}")
    result = IngestResult(corpus=Corpus(name or path.name))
    try:
        if format == "jsonl":
            _ingest_jsonl(path, result)
        else:
            if not path.is_dir():
                raise UsageError(f"textdir corpus must be a directory: {path}")
            _ingest_textdir(path, result)
    except OSError as exc:
        raise UsageError(f"cannot read corpus {path}: {exc}") from exc
    total = result.corpus.doc_count + result.skipped
    if total > 0 and result.skipped * 2 > total:
        raise DataFormatError(
            f"{result.skipped} of {total} records malformed in {path}; refusing to continue"
        )
    return result


def save_corpus(corpus: Corpus, path: str | Path, meta: dict | None = None) -> None:
    """Write a corpus as canonical JSONL, with an optional leading meta record."""
    path = Path(path)
    lines = []
    if meta is not None:
        lines.append(json.dumps({META_KEY: meta}, sort_keys=True))
    for post in corpus:
        record: dict = {"id": post.post_id, "text": post.text}
        if post.thread_id:
            record["thread_id"] = post.thread_id
        if post.user_id:
            record["user_id"] = post.user_id
        if post.timestamp is not None:
            record["timestamp"] = post.timestamp
        lines.append(json.dumps(record, sort_keys=True))
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    tmp.replace(path)
