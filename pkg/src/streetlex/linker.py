"""Substance-to-effect linking by post-level co-occurrence.

A post mentioning a substance and an effect contributes one count to that
pair, however many times either term is repeated inside the post. Links
below a minimum support are dropped as chance co-mentions."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .classifier import LABEL_EFFECT, LABEL_SUBSTANCE
from .corpus import Corpus
from .errors import UsageError
from .text import tokenize


@dataclass(frozen=True)
class PostMetadata:
    post_id: str
    substances: frozenset[str]
    effects: frozenset[str]


class LinkTable:
    """Per-substance effect lists, ordered by count desc then effect asc."""

    def __init__(self, counts: Counter, min_support: int):
        self.min_support = min_support
        self._links: dict[str, list[tuple[str, int]]] = {}
        for (substance, effect), count in counts.items():
            if count >= min_support:
                self._links.setdefault(substance, []).append((effect, count))
        for substance in self._links:
            self._links[substance].sort(key=lambda pair: (-pair[1], pair[0]))

    def substances(self) -> list[str]:
        return sorted(self._links)

    def effects_for(self, substance: str) -> list[tuple[str, int]]:
        return list(self._links.get(substance, []))

    def __len__(self) -> int:
        return sum(len(v) for v in self._links.values())


def _build_matcher(lexicon: Mapping[str, str]) -> dict[str, list[tuple[tuple[str, ...], str, str]]]:
    matcher: dict[str, list[tuple[tuple[str, ...], str, str]]] = {}
    for term, label in lexicon.items():
        if label not in (LABEL_SUBSTANCE, LABEL_EFFECT):
            continue
        term_tokens = tuple(term.split(" "))
        if not term_tokens or not all(term_tokens):
            raise UsageError(f"lexicon term {term!r} is not a normalized surface")
        matcher.setdefault(term_tokens[0], []).append((term_tokens, term, label))
    return matcher


def annotate_posts(corpus: Corpus, lexicon: Mapping[str, str]) -> list[PostMetadata]:
    """Tag every post with the lexicon terms it contains.

    ``lexicon`` maps normalized surfaces to class labels; Unassigned entries
    are ignored. Matching is by contiguous token sequence under the corpus
    normalization."""
    matcher = _build_matcher(lexicon)
    annotated = []
    for post in corpus:
        tokens = tokenize(post.text)
        substances: set[str] = set()
        effects: set[str] = set()
        for pos, token in enumerate(tokens):
            for term_tokens, term, label in matcher.get(token, ()):
                if tuple(tokens[pos : pos + len(term_tokens)]) == term_tokens:
                    (substances if label == LABEL_SUBSTANCE else effects).add(term)
        annotated.append(
            PostMetadata(
                post_id=post.post_id,
                substances=frozenset(substances),
                effects=frozenset(effects),
            )
        )
    return annotated


def build_links(metadata: list[PostMetadata], min_support: int = 3) -> LinkTable:
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    counts: Counter = Counter()
    for post in metadata:
        for substance in post.substances:
            for effect in post.effects:
                counts[(substance, effect)] += 1
    return LinkTable(counts, min_support)


def write_links_tsv(table: LinkTable, path: str | Path, header_lines: list[str] | None = None) -> None:
    path = Path(path)
    lines = [f"# {line}" for line in (header_lines or [])]
    lines.append("substance\teffect\tcount")
    for substance in table.substances():
        for effect, count in table.effects_for(substance):
            lines.append(f"{substance}\t{effect}\t{count}")
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    tmp.replace(path)


def summary_report(table: LinkTable, metadata: list[PostMetadata], top_substances: int = 10, top_effects: int = 5) -> str:
    """Plain-text table of the most-discussed substances and their top effects."""
    post_counts: Counter = Counter()
    for post in metadata:
        for substance in post.substances:
            post_counts[substance] += 1
    ranked = sorted(
        (s for s in table.substances()),
        key=lambda s: (-post_counts[s], s),
    )[:top_substances]
    lines = [f"{'substance':<24}{'posts':>8}  top effects"]
    for substance in ranked:
        effects = ", ".join(
            f"{effect} ({count})" for effect, count in table.effects_for(substance)[:top_effects]
        )
        lines.append(f"{substance:<24}{post_counts[substance]:>8}  {effects}")
    return "\n".join(lines)
