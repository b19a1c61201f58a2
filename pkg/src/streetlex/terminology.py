"""Contrastive terminology extraction.

Candidate terms are the 1..3-grams of the domain corpus ranked by how much
more frequent they are there than in a background corpus:

    relevance = p_d * ln(p_d / max(p_b, eps))

with p_d and p_b the n-gram frequency relative to the corpus token count.
Stopwords are never removed; the score suppresses anything common in the
background on its own."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus
from .errors import DataFormatError, UsageError
from .text import split_sentences, tokenize


@dataclass(frozen=True)
class TerminologyConfig:
    min_df: int = 5
    max_candidates: int = 5000
    smoothing: float = 1e-9
    n_max: int = 3


@dataclass(frozen=True)
class CandidateTerm:
    surface: str
    df_domain: int
    tf_domain: int
    tf_background: int
    relevance: float


def extract_ngrams(post_text: str, n_max: int = 3) -> Counter:
    """Multiset of 1..n_max-grams of one post.

    N-grams never cross sentence boundaries (., !, ?, newline). Keys are
    normalized tokens joined by single spaces."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    grams: Counter = Counter()
    for sentence in split_sentences(post_text):
        tokens = tokenize(sentence)
        for n in range(1, n_max + 1):
            for i in range(len(tokens) - n + 1):
                grams[" ".join(tokens[i : i + n])] += 1
    return grams


def corpus_ngram_stats(corpus: Corpus, n_max: int = 3) -> tuple[Counter, Counter, int]:
    """(term frequencies, document frequencies, total token count)."""
    tf: Counter = Counter()
    df: Counter = Counter()
    total_tokens = 0
    for post in corpus:
        grams = extract_ngrams(post.text, n_max)
        tf.update(grams)
        df.update(grams.keys())
        total_tokens += sum(c for gram, c in grams.items() if " " not in gram)
    return tf, df, total_tokens


def contrastive_score(
    tf_domain: int,
    n_domain_tokens: int,
    tf_background: int,
    n_background_tokens: int,
    eps: float = 1e-9,
) -> float:
    """Smoothed contrastive relevance of one n-gram. Zero when unseen in domain."""
    if tf_domain <= 0:
        return 0.0
    if n_domain_tokens <= 0 or n_background_tokens <= 0:
        raise ValueError("token counts must be positive")
    p_d = tf_domain / n_domain_tokens
    p_b = tf_background / n_background_tokens
    return p_d * math.log(p_d / max(p_b, eps))


def extract_candidates(
    domain: Corpus, background: Corpus, cfg: TerminologyConfig = TerminologyConfig()
) -> list[CandidateTerm]:
    """Ranked candidate list: relevance descending, ties lexicographic."""
    if background.doc_count == 0:
        raise UsageError("background corpus is empty; contrastive scoring is undefined")
    tf_d, df_d, n_d = corpus_ngram_stats(domain, cfg.n_max)
    tf_b, _, n_b = corpus_ngram_stats(background, cfg.n_max)
    if n_d == 0:
        return []
    candidates = []
    for surface, df in df_d.items():
        if df < cfg.min_df:
            continue
        candidates.append(
            CandidateTerm(
                surface=surface,
                df_domain=df,
                tf_domain=tf_d[surface],
                tf_background=tf_b.get(surface, 0),
                relevance=contrastive_score(
                    tf_d[surface], n_d, tf_b.get(surface, 0), n_b, cfg.smoothing
                ),
            )
        )
    candidates.sort(key=lambda c: (-c.relevance, c.surface))
    return candidates[: cfg.max_candidates]


def write_candidates_tsv(candidates: list[CandidateTerm], path: str | Path, header_lines: list[str] | None = None) -> None:
    path = Path(path)
    lines = [f"# {line}" for line in (header_lines or [])]
    lines.append("surface\tdf_domain\ttf_domain\ttf_background\trelevance")
    for c in candidates:
        lines.append(f"{c.surface}\t{c.df_domain}\t{c.tf_domain}\t{c.tf_background}\t{c.relevance!r}")
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    tmp.replace(path)


def read_candidates_tsv(path: str | Path) -> list[CandidateTerm]:
    path = Path(path)
    candidates = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read candidates {path}: {exc}") from exc
    for line in lines:
        if not line or line.startswith("#") or line.startswith("surface\t"):
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise DataFormatError(f"bad candidates row in {path}: {line!r}")
        candidates.append(
            CandidateTerm(
                surface=parts[0],
                df_domain=int(parts[1]),
                tf_domain=int(parts[2]),
                tf_background=int(parts[3]),
                relevance=float(parts[4]),
            )
        )
    return candidates
