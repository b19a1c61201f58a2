import pytest

from streetlex.classifier import LABEL_EFFECT, LABEL_SUBSTANCE
from streetlex.errors import UsageError
from streetlex.linker import (
    LinkTable,
    annotate_posts,
    build_links,
    summary_report,
    write_links_tsv,
)

from conftest import corpus_from_texts

LEX = {
    "heroin": LABEL_SUBSTANCE,
    "snow": LABEL_SUBSTANCE,
    "magic mushrooms": LABEL_SUBSTANCE,
    "headache": LABEL_EFFECT,
    "nausea": LABEL_EFFECT,
}


def links_from(texts, min_support=3, lexicon=LEX):
    corpus = corpus_from_texts(texts)
    metadata = annotate_posts(corpus, lexicon)
    return build_links(metadata, min_support), metadata


def test_single_post_example_yields_one_link_at_min_support_one():
    table, _ = links_from(["heroin gave me a terrible headache"], min_support=1)
    assert table.substances() == ["heroin"]
    assert table.effects_for("heroin") == [("headache", 1)]
    assert len(table) == 1


def test_default_min_support_filters_rare_pairs():
    texts = ["heroin then headache"] * 3 + ["snow then nausea"] * 2
    table, _ = links_from(texts)
    assert table.substances() == ["heroin"]
    assert table.effects_for("snow") == []


def test_counting_is_per_post_not_per_mention():
    texts = ["heroin heroin heroin gave headache headache"]
    table, _ = links_from(texts, min_support=1)
    assert table.effects_for("heroin") == [("headache", 1)]


def test_raising_min_support_only_shrinks_the_table():
    texts = (
        ["heroin with headache"] * 5
        + ["heroin with nausea"] * 3
        + ["snow with nausea"] * 2
    )
    by_support = {}
    for support in (1, 2, 3, 4, 5, 6):
        table, _ = links_from(texts, min_support=support)
        by_support[support] = {
            (s, e, c) for s in table.substances() for e, c in table.effects_for(s)
        }
    for support in (2, 3, 4, 5, 6):
        assert by_support[support] <= by_support[support - 1]
    assert by_support[6] == set()


def test_effects_are_ordered_by_count_then_name():
    texts = ["heroin with nausea"] * 4 + ["heroin with headache"] * 4 + ["heroin with apathy"] * 2
    lexicon = dict(LEX, apathy=LABEL_EFFECT)
    table, _ = links_from(texts, min_support=1, lexicon=lexicon)
    assert table.effects_for("heroin") == [("headache", 4), ("nausea", 4), ("apathy", 2)]


def test_multi_token_terms_and_normalization_match():
    texts = ["those Magic   Mushrooms left me a HEADACHE."] * 3
    table, _ = links_from(texts)
    assert table.effects_for("magic mushrooms") == [("headache", 3)]


def test_unassigned_lexicon_entries_are_ignored():
    lexicon = dict(LEX, filler="Unassigned")
    texts = ["heroin filler headache"] * 3
    table, metadata = links_from(texts, lexicon=lexicon)
    assert table.effects_for("heroin") == [("headache", 3)]
    assert all("filler" not in m.substances | m.effects for m in metadata)


def test_denormalized_lexicon_surface_is_an_error():
    with pytest.raises(UsageError):
        annotate_posts(corpus_from_texts(["x"]), {"Bad Surface ": LABEL_SUBSTANCE})


def test_min_support_validation():
    with pytest.raises(ValueError):
        build_links([], min_support=0)


def test_summary_report_ranks_by_post_count():
    texts = ["snow gave nausea"] * 5 + ["heroin gave headache"] * 3
    table, metadata = links_from(texts, min_support=1)
    report = summary_report(table, metadata, top_substances=1)
    lines = report.splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("snow")
    assert "nausea (5)" in lines[1]


def test_links_tsv_shape(tmp_path):
    texts = ["heroin gave headache"] * 3
    table, _ = links_from(texts)
    path = tmp_path / "links.tsv"
    write_links_tsv(table, path, header_lines=["config_hash=000011112222"])
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# config_hash=000011112222"
    assert lines[1] == "substance\teffect\tcount"
    assert lines[2] == "heroin\theadache\t3"
