import math
import random
from collections import Counter

import pytest

from streetlex.corpus import Corpus, Post
from streetlex.errors import UsageError
from streetlex.terminology import (
    CandidateTerm,
    TerminologyConfig,
    contrastive_score,
    extract_candidates,
    extract_ngrams,
    read_candidates_tsv,
    write_candidates_tsv,
)
from streetlex.text import split_sentences, tokenize

from conftest import corpus_from_texts


def naive_ngrams(text, n_max=3):
    """Independent enumeration: n-grams inside each sentence fragment."""
    grams = Counter()
    for fragment in split_sentences(text):
        tokens = tokenize(fragment)
        for n in range(1, n_max + 1):
            for i in range(len(tokens) - n + 1):
                grams[" ".join(tokens[i : i + n])] += 1
    return grams


def test_ngrams_of_a_short_phrase():
    grams = extract_ngrams("the red pill")
    assert set(grams) == {"the", "red", "pill", "the red", "red pill", "the red pill"}
    assert all(count == 1 for count in grams.values())


def test_ngrams_never_cross_sentence_boundaries():
    grams = extract_ngrams("a. b")
    assert set(grams) == {"a", "b"}
    grams = extract_ngrams("one two\nthree")
    assert "two three" not in grams
    assert "one two" in grams


def test_ngrams_match_naive_enumeration_on_a_long_post():
    rng = random.Random(99)
    words = ["speed", "comedown", "harsh", "was", "the", "really"]
    text = ""
    while len(text) < 200:
        text += rng.choice(words) + rng.choice([" ", " ", ". ", "! "])
    assert extract_ngrams(text) == naive_ngrams(text)


def test_contrastive_score_worked_example():
    score = contrastive_score(100, 10_000, 1, 10_000)
    assert score == pytest.approx(0.01 * math.log(100), abs=1e-12)
    assert score == pytest.approx(0.04605, abs=5e-6)


def test_contrastive_score_conventions():
    assert contrastive_score(0, 1000, 5, 1000) == 0.0
    assert contrastive_score(10, 1000, 10, 1000) == 0.0
    # unseen in background: the floor keeps the log finite
    assert contrastive_score(10, 1000, 0, 1000) > 0
    with pytest.raises(ValueError):
        contrastive_score(1, 0, 1, 1000)


def jargon_corpus():
    rng = random.Random(4)
    common = ["the", "forum", "people", "talk", "about", "life", "daily", "stuff"]
    planted = [f"jarg{i:02d}" for i in range(50)]
    domain_texts = []
    for i in range(300):
        words = [rng.choice(common) for _ in range(10)]
        words.insert(3, planted[i % 50])
        domain_texts.append(" ".join(words) + ".")
    background_texts = [
        " ".join(rng.choice(common) for _ in range(12)) + "." for _ in range(300)
    ]
    return corpus_from_texts(domain_texts, prefix="d"), corpus_from_texts(
        background_texts, prefix="b"
    ), planted


def test_planted_jargon_ranks_high():
    domain, background, planted = jargon_corpus()
    candidates = extract_candidates(domain, background, TerminologyConfig(min_df=5))
    top200 = {c.surface for c in candidates[:200]}
    assert set(planted) <= top200


def test_min_df_filter_and_truncation():
    domain, background, _ = jargon_corpus()
    cfg = TerminologyConfig(min_df=5, max_candidates=20)
    candidates = extract_candidates(domain, background, cfg)
    assert len(candidates) == 20
    assert all(c.df_domain >= 5 for c in candidates)


def test_identical_corpora_score_zero_and_rank_lexicographically():
    domain = corpus_from_texts(["alpha beta gamma"] * 6, prefix="d")
    background = corpus_from_texts(["alpha beta gamma"] * 6, prefix="b")
    candidates = extract_candidates(domain, background, TerminologyConfig(min_df=5))
    assert all(c.relevance == 0.0 for c in candidates)
    assert [c.surface for c in candidates] == sorted(c.surface for c in candidates)


def test_ranking_is_scale_invariant():
    domain, background, _ = jargon_corpus()
    cfg = TerminologyConfig(min_df=5)
    base = [c.surface for c in extract_candidates(domain, background, cfg)]

    def triple(corpus, prefix):
        out = Corpus(prefix)
        for rep in range(3):
            for post in corpus:
                out.add(Post(f"{prefix}{rep}-{post.post_id}", post.text))
        return out

    scaled_cfg = TerminologyConfig(min_df=15)
    scaled = [
        c.surface
        for c in extract_candidates(triple(domain, "D"), triple(background, "B"), scaled_cfg)
    ]
    assert scaled == base


def test_empty_background_is_fatal():
    domain = corpus_from_texts(["some words here"])
    with pytest.raises(UsageError):
        extract_candidates(domain, Corpus("empty"), TerminologyConfig())


def test_candidates_tsv_round_trip(tmp_path):
    rows = [
        CandidateTerm("speed", 7, 9, 1, 0.5),
        CandidateTerm("magic mushrooms", 5, 5, 0, 0.25),
    ]
    path = tmp_path / "candidates.tsv"
    write_candidates_tsv(rows, path, header_lines=["config_hash=deadbeef0000"])
    assert read_candidates_tsv(path) == rows
