"""Masked context-window harvesting.

Each occurrence of a term yields a snippet: a fixed number of raw
characters on each side of the occurrence, with the occurrence itself
replaced by a mask token that never occurs in forum text. Any further
occurrence of the same term inside the window is masked as well, so a
snippet never leaks the surface it was harvested for."""
from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus
from .errors import UsageError
from .index import Index, find_occurrences
from .text import normalize_term, tokenize

DEFAULT_MASK = "CTHULHUFHTAGN"


@dataclass(frozen=True)
class ContextConfig:
    window_chars: int = 50  # characters kept on each side of the occurrence
    mask_token: str = DEFAULT_MASK
    max_posts_per_term: int = 3000

    def __post_init__(self) -> None:
        if self.window_chars < 0:
            raise ValueError("window_chars must be >= 0")
        if self.max_posts_per_term < 0:
            raise ValueError("max_posts_per_term must be >= 0")
        if tokenize(self.mask_token) != [self.mask_token.lower()]:
            raise ValueError("mask_token must normalize to exactly one token")


@dataclass(frozen=True)
class ContextSnippet:
    source_post_id: str
    masked_text: str
    term_surface: str  # bookkeeping only; never a model feature


def _mask_window(raw: str, window: tuple[int, int], spans: list[tuple[int, int]], mask: str) -> str:
    ws, we = window
    parts: list[str] = []
    cursor = ws
    for start, end in spans:
        if end <= ws or start >= we:
            continue
        clipped_start = max(start, ws)
        clipped_end = min(end, we)
        parts.append(raw[cursor:clipped_start])
        parts.append(mask)
        cursor = clipped_end
    parts.append(raw[cursor:we])
    return "".join(parts)


def harvest(index: Index, corpus: Corpus, term: str, cfg: ContextConfig) -> list[ContextSnippet]:
    """Masked context snippets for ``term``, at most one per post and at most
    ``cfg.max_posts_per_term`` in total. Missing terms yield an empty list."""
    surface = normalize_term(term)
    if not surface:
        raise UsageError("term normalizes to no tokens")
    mask_norm = normalize_term(cfg.mask_token)
    if index.df.get(mask_norm, 0) > 0:
        raise UsageError(f"mask token {cfg.mask_token!r} occurs in the corpus")
    snippets: list[ContextSnippet] = []
    for occ in find_occurrences(index, surface, cfg.max_posts_per_term):
        raw = corpus.get(occ.post_id).text
        window = (
            max(0, occ.char_start - cfg.window_chars),
            min(len(raw), occ.char_end + cfg.window_chars),
        )
        spans = index.occurrences_in_post(surface, occ.post_id)
        snippets.append(
            ContextSnippet(
                source_post_id=occ.post_id,
                masked_text=_mask_window(raw, window, spans, cfg.mask_token),
                term_surface=surface,
            )
        )
    return snippets
