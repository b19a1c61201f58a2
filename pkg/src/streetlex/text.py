"""Tokenization and normalization rules shared by every stage.

A token is a maximal run of letters, digits, or apostrophes; every other
character separates tokens (underscore included). Character spans always
refer to the raw, un-normalized text so that windows and masks can be cut
from the original post."""
from __future__ import annotations

import re
import unicodedata

# Combining marks (common block) are kept inside runs so that NFD input
# tokenizes the same as its NFC form.
_TOKEN_RE = re.compile(r"(?:[^\W_]|['’̀-ͯ])+")
_SENTENCE_RE = re.compile(r"[.!?\n]")

NORMALIZER_VERSION = "v1"


def normalize(text: str) -> str:
    """Lowercased, NFC-composed form of ``text``."""
    return unicodedata.normalize("NFC", text).lower()


def tokenize(text: str) -> list[str]:
    """Normalized tokens of ``text``, in order."""
    return [normalize(m.group()) for m in _TOKEN_RE.finditer(text)]


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """``(token, char_start, char_end)`` triples; spans index the raw text."""
    return [
        (normalize(m.group()), m.start(), m.end())
        for m in _TOKEN_RE.finditer(text)
    ]


def normalize_term(term: str) -> str:
    """Canonical surface of a term: normalized tokens joined by single spaces."""
    return " ".join(tokenize(term))


def split_sentences(text: str) -> list[str]:
    """Sentence fragments of ``text``, split on ``.``, ``!``, ``?``, newline.

    Fragments may be empty; callers tokenize them anyway."""
    return _SENTENCE_RE.split(text)
