"""The index must agree with a naive scan of the corpus, survive a disk
round trip unchanged, and refuse artifacts it did not write."""
import json
import random

import pytest

from streetlex.corpus import Corpus, Post
from streetlex.errors import ArtifactVersionError, UsageError
from streetlex.index import Index, build_index, find_occurrences
from streetlex.text import tokenize, tokenize_with_spans

from conftest import corpus_from_texts


def naive_first_occurrence(text, term_tokens):
    """(char_start, char_end) of the first token-sequence match, or None."""
    triples = tokenize_with_spans(text)
    tokens = [t for t, _, _ in triples]
    k = len(term_tokens)
    for pos in range(len(tokens) - k + 1):
        if tokens[pos : pos + k] == list(term_tokens):
            return triples[pos][1], triples[pos + k - 1][2]
    return None


def random_corpus(seed, n_posts=60):
    rng = random.Random(seed)
    vocab = ["dose", "trip", "bad", "snow", "magic", "mushrooms", "felt", "sick", "good"]
    texts = []
    for _ in range(n_posts):
        words = [rng.choice(vocab) for _ in range(rng.randrange(3, 25))]
        # sprinkle punctuation so spans and tokens diverge from plain split
        text = ""
        for w in words:
            text += w + rng.choice([" ", ", ", ". ", "! ", "-"])
        texts.append(text)
    return corpus_from_texts(texts)


@pytest.mark.parametrize("term", ["snow", "magic mushrooms", "bad trip", "felt sick good"])
def test_occurrences_match_naive_scan(term):
    corpus = random_corpus(11)
    index = build_index(corpus)
    term_tokens = tokenize(term)

    expected = []
    for post in corpus:
        span = naive_first_occurrence(post.text, term_tokens)
        if span is not None:
            expected.append((post.post_id, span[0], span[1]))
    expected.sort()

    got = [(o.post_id, o.char_start, o.char_end) for o in find_occurrences(index, term, 10_000)]
    assert got == expected


def test_doc_frequency_matches_naive_count():
    corpus = random_corpus(23)
    index = build_index(corpus)
    for term in ["dose", "snow magic", "magic mushrooms", "absent"]:
        term_tokens = tokenize(term)
        expected = sum(
            1 for post in corpus if naive_first_occurrence(post.text, term_tokens) is not None
        )
        assert index.doc_frequency(term) == expected


def test_one_occurrence_per_post_and_cap():
    corpus = corpus_from_texts(["dose dose dose" for _ in range(10)])
    index = build_index(corpus)
    hits = find_occurrences(index, "dose", 4)
    assert len(hits) == 4
    assert len({o.post_id for o in hits}) == 4
    assert all(o.char_start == 0 for o in hits)
    assert find_occurrences(index, "dose", 0) == []


def test_occurrences_in_post_lists_every_span():
    corpus = corpus_from_texts(["snow, then SNOW again: snow."])
    index = build_index(corpus)
    spans = index.occurrences_in_post("snow", "p000")
    text = corpus.get("p000").text
    assert [text[s:e].lower() for s, e in spans] == ["snow", "snow", "snow"]
    assert spans == sorted(spans)
    assert index.occurrences_in_post("snow", "missing") == []


def test_match_across_punctuation():
    corpus = corpus_from_texts(["the track-marks itched"])
    index = build_index(corpus)
    assert index.doc_frequency("track marks") == 1
    occ = find_occurrences(index, "track marks", 10)[0]
    assert corpus.get(occ.post_id).text[occ.char_start : occ.char_end] == "track-marks"


def test_round_trip_preserves_everything(tmp_path):
    corpus = random_corpus(5)
    index = build_index(corpus)
    path = tmp_path / "index.json"
    index.save(path, meta={"config_hash": "abc"})

    loaded = Index.load(path)
    assert loaded.doc_count == index.doc_count
    assert loaded.df == index.df
    assert loaded.meta == {"config_hash": "abc"}
    for term in ["dose", "magic mushrooms"]:
        assert find_occurrences(loaded, term, 1000) == find_occurrences(index, term, 1000)

    loaded.save(tmp_path / "again.json", meta={"config_hash": "abc"})
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_load_rejects_foreign_and_stale_artifacts(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"magic": "something-else"}), encoding="utf-8")
    with pytest.raises(ArtifactVersionError):
        Index.load(path)

    corpus = corpus_from_texts(["one post"])
    good = tmp_path / "good.json"
    build_index(corpus).save(good)
    payload = json.loads(good.read_text(encoding="utf-8"))

    payload["version"] = 999
    stale = tmp_path / "stale.json"
    stale.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ArtifactVersionError):
        Index.load(stale)

    payload["version"] = 1
    payload["normalizer"] = "v0"
    foreign = tmp_path / "foreign.json"
    foreign.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ArtifactVersionError):
        Index.load(foreign)

    with pytest.raises(UsageError):
        Index.load(tmp_path / "missing.json")


def test_empty_term_is_an_error():
    index = build_index(corpus_from_texts(["hello"]))
    with pytest.raises(UsageError):
        find_occurrences(index, "...", 10)
