"""Inverted index with character-positional postings.

The index keeps, per post, the normalized token sequence together with the
raw-text character span of every token. Multi-token terms match contiguous
token sequences; reported spans always index the original post text. The
serialized form stores only the per-post token/span arrays; postings and
document frequencies are rebuilt on load, so a rebuild from the corpus is
the source of truth."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import Corpus
from .errors import ArtifactVersionError, UsageError
from .text import NORMALIZER_VERSION, normalize_term, tokenize, tokenize_with_spans

INDEX_MAGIC = "streetlex-index"
INDEX_VERSION = 1


@dataclass(frozen=True)
class Occurrence:
    post_id: str
    char_start: int
    char_end: int  # exclusive


class Index:
    def __init__(self) -> None:
        self.doc_count = 0
        self.df: dict[str, int] = {}
        self.meta: dict = {}
        self._post_ids: list[str] = []
        self._post_ord: dict[str, int] = {}
        self._tokens: list[list[str]] = []
        self._starts: list[list[int]] = []
        self._ends: list[list[int]] = []
        # token -> list of (post ordinal, token positions within the post)
        self._postings: dict[str, list[tuple[int, list[int]]]] = {}

    def _add_post(self, post_id: str, tokens: list[str], starts: list[int], ends: list[int]) -> None:
        ord_ = len(self._post_ids)
        self._post_ids.append(post_id)
        self._post_ord[post_id] = ord_
        self._tokens.append(tokens)
        self._starts.append(starts)
        self._ends.append(ends)
        positions: dict[str, list[int]] = {}
        for pos, token in enumerate(tokens):
            positions.setdefault(token, []).append(pos)
        for token, pos_list in positions.items():
            self._postings.setdefault(token, []).append((ord_, pos_list))
            self.df[token] = self.df.get(token, 0) + 1
        self.doc_count += 1

    def post_ids(self) -> list[str]:
        return list(self._post_ids)

    def tokens_of(self, post_id: str) -> list[str]:
        return self._tokens[self._post_ord[post_id]]

    def _matches_in_ord(self, term_tokens: tuple[str, ...], ord_: int, first_positions: list[int]) -> list[tuple[int, int]]:
        """Raw-text spans of every contiguous match in one post."""
        tokens = self._tokens[ord_]
        starts = self._starts[ord_]
        ends = self._ends[ord_]
        k = len(term_tokens)
        spans: list[tuple[int, int]] = []
        for pos in first_positions:
            if pos + k > len(tokens):
                continue
            if tuple(tokens[pos : pos + k]) == term_tokens:
                spans.append((starts[pos], ends[pos + k - 1]))
        return spans

    def occurrences_in_post(self, term: str, post_id: str) -> list[tuple[int, int]]:
        """All raw-text spans of ``term`` in one post, in offset order."""
        term_tokens = tuple(tokenize(term))
        if not term_tokens:
            raise UsageError("term normalizes to no tokens")
        ord_ = self._post_ord.get(post_id)
        if ord_ is None:
            return []
        for posted_ord, positions in self._postings.get(term_tokens[0], ()):
            if posted_ord == ord_:
                return self._matches_in_ord(term_tokens, ord_, positions)
        return []

    def doc_frequency(self, term: str) -> int:
        """Number of distinct posts containing ``term`` (multi-token aware)."""
        term_tokens = tuple(tokenize(term))
        if not term_tokens:
            raise UsageError("term normalizes to no tokens")
        if len(term_tokens) == 1:
            return self.df.get(term_tokens[0], 0)
        count = 0
        for ord_, positions in self._postings.get(term_tokens[0], ()):
            if self._matches_in_ord(term_tokens, ord_, positions):
                count += 1
        return count

    def occurrences(self, term: str, max_posts: int) -> list[Occurrence]:
        """At most one occurrence (the first by offset) from each of at most
        ``max_posts`` posts, ordered by (post_id, char_start).

        Posts are considered in corpus insertion order when the cap bites."""
        term_tokens = tuple(tokenize(term))
        if not term_tokens:
            raise UsageError("term normalizes to no tokens")
        if max_posts <= 0:
            return []
        found: list[Occurrence] = []
        for ord_, positions in self._postings.get(term_tokens[0], ()):
            spans = self._matches_in_ord(term_tokens, ord_, positions)
            if not spans:
                continue
            start, end = spans[0]
            found.append(Occurrence(self._post_ids[ord_], start, end))
            if len(found) >= max_posts:
                break
        found.sort(key=lambda o: (o.post_id, o.char_start))
        return found

    def save(self, path: str | Path, meta: dict | None = None) -> None:
        payload = {
            "magic": INDEX_MAGIC,
            "version": INDEX_VERSION,
            "normalizer": NORMALIZER_VERSION,
            "meta": meta if meta is not None else self.meta,
            "doc_count": self.doc_count,
            "post_ids": self._post_ids,
            "tokens": self._tokens,
            "starts": self._starts,
            "ends": self._ends,
        }
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with tmp.open("w", encoding="utf-8") as handle:
            json.dump(payload, handle, separators=(",", ":"), sort_keys=True)
        tmp.replace(path)

    @classmethod
    def load(cls, path: str | Path) -> "Index":
        path = Path(path)
        try:
            with path.open("r", encoding="utf-8") as handle:
                payload = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read index {path}: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("magic") != INDEX_MAGIC:
            raise ArtifactVersionError(f"{path} is not an index file")
        if payload.get("version") != INDEX_VERSION:
            raise ArtifactVersionError(
                f"index version {payload.get('version')} unsupported (expected {INDEX_VERSION})"
            )
        if payload.get("normalizer") != NORMALIZER_VERSION:
            raise ArtifactVersionError("index was built with a different normalizer")
        index = cls()
        index.meta = payload.get("meta", {})
        for post_id, tokens, starts, ends in zip(
            payload["post_ids"], payload["tokens"], payload["starts"], payload["ends"]
        ):
            index._add_post(post_id, tokens, starts, ends)
        if index.doc_count != payload["doc_count"]:
            raise ArtifactVersionError("index doc_count does not match its posts")
        return index


def build_index(corpus: Corpus, meta: dict | None = None) -> Index:
    """Index every post of ``corpus``. Deterministic for a given corpus."""
    index = Index()
    if meta is not None:
        index.meta = meta
    for post in corpus:
        triples = tokenize_with_spans(post.text)
        index._add_post(
            post.post_id,
            [t for t, _, _ in triples],
            [s for _, s, _ in triples],
            [e for _, _, e in triples],
        )
    return index


def find_occurrences(index: Index, term: str, max_posts: int) -> list[Occurrence]:
    """Normalizing wrapper around Index.occurrences. Unknown terms yield []."""
    surface = normalize_term(term)
    if not surface:
        raise UsageError("term normalizes to no tokens")
    return index.occurrences(surface, max_posts)


def iter_token_counts(index: Index) -> Iterable[tuple[str, int]]:
    for token, postings in index._postings.items():
        yield token, sum(len(p) for _, p in postings)
