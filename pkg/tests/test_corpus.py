import json

import pytest

from streetlex.corpus import Corpus, Post, ingest, save_corpus
from streetlex.errors import DataFormatError, UsageError


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


def test_jsonl_round_trip(tmp_path):
    corpus = Corpus("orig")
    corpus.add(Post("a", "first post", thread_id="t1", user_id="u1", timestamp="2015-03-01T10:00:00Z"))
    corpus.add(Post("b", "second post"))
    out = tmp_path / "c.jsonl"
    save_corpus(corpus, out, meta={"note": "round trip"})

    back = ingest(out, "jsonl").corpus
    assert [p.post_id for p in back] == ["a", "b"]
    assert back.get("a").thread_id == "t1"
    assert back.get("a").timestamp == "2015-03-01T10:00:00Z"
    assert back.get("b").text == "second post"


def test_save_is_deterministic(tmp_path):
    corpus = Corpus("c", [Post("x", "hello"), Post("y", "world")])
    save_corpus(corpus, tmp_path / "one.jsonl")
    save_corpus(corpus, tmp_path / "two.jsonl")
    assert (tmp_path / "one.jsonl").read_bytes() == (tmp_path / "two.jsonl").read_bytes()


def test_malformed_records_are_skipped_and_counted(tmp_path):
    path = tmp_path / "c.jsonl"
    good = [json.dumps({"id": f"ok{i}", "text": f"fine post {i}"}) for i in range(6)]
    lines = good + [
        "this is not json",
        json.dumps({"text": "no id"}),
        json.dumps({"id": "bad1", "text": "   "}),
        json.dumps({"id": "bad2", "text": "bad ts", "timestamp": "not-a-date"}),
        json.dumps(["not", "an", "object"]),
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    result = ingest(path, "jsonl")
    assert [p.post_id for p in result.corpus] == [f"ok{i}" for i in range(6)]
    assert result.skipped == 5
    assert result.reasons["bad json"] == 1
    assert result.reasons["missing id"] == 1
    assert result.reasons["bad timestamp"] == 1


def test_mostly_broken_input_is_fatal(tmp_path):
    path = tmp_path / "c.jsonl"
    lines = ["garbage"] * 6 + [json.dumps({"id": "a", "text": "one good post"})]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(DataFormatError):
        ingest(path, "jsonl")


def test_meta_record_is_not_a_post(tmp_path):
    corpus = Corpus("c", [Post("x", "hello")])
    out = tmp_path / "c.jsonl"
    save_corpus(corpus, out, meta={"artifact": "corpus"})
    assert ingest(out, "jsonl").corpus.doc_count == 1


def test_textdir_ingest(tmp_path):
    d = tmp_path / "posts"
    d.mkdir()
    (d / "002.txt").write_text("second", encoding="utf-8")
    (d / "001.txt").write_text("first", encoding="utf-8")
    (d / "empty.txt").write_text("   ", encoding="utf-8")
    result = ingest(d, "textdir")
    assert [p.post_id for p in result.corpus] == ["001.txt", "002.txt"]
    assert result.skipped == 1


def test_unknown_format_and_missing_path(tmp_path):
    with pytest.raises(UsageError):
        ingest(tmp_path / "c.jsonl", "parquet")
    with pytest.raises(UsageError):
        ingest(tmp_path / "nowhere.jsonl", "jsonl")


def test_duplicate_ids_rejected():
    corpus = Corpus("c", [Post("x", "hello")])
    with pytest.raises(ValueError):
        corpus.add(Post("x", "again"))
    with pytest.raises(ValueError):
        corpus.add(Post("", "anonymous"))
    with pytest.raises(ValueError):
        corpus.add(Post("y", "  "))
