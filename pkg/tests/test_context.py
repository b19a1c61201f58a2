import pytest

from streetlex.context import DEFAULT_MASK, ContextConfig, harvest
from streetlex.errors import UsageError
from streetlex.index import build_index
from streetlex.text import normalize

from conftest import corpus_from_texts


def snippets_for(texts, term, **cfg_kwargs):
    corpus = corpus_from_texts(texts)
    index = build_index(corpus)
    return harvest(index, corpus, term, ContextConfig(**cfg_kwargs))


def test_masking_worked_example():
    [snippet] = snippets_for(["heroin gave me a terrible headache"], "heroin")
    assert snippet.masked_text == "CTHULHUFHTAGN gave me a terrible headache"
    assert snippet.term_surface == "heroin"


def test_window_is_fifty_chars_per_side_by_default():
    left = "x" * 80
    right = "y" * 80
    [snippet] = snippets_for([f"{left} dose {right}"], "dose")
    assert snippet.masked_text == "x" * 49 + " " + DEFAULT_MASK + " " + "y" * 49


def test_short_posts_truncate_without_padding():
    [snippet] = snippets_for(["take dose"], "dose")
    assert snippet.masked_text == f"take {DEFAULT_MASK}"
    [snippet] = snippets_for(["dose"], "dose")
    assert snippet.masked_text == DEFAULT_MASK


def test_secondary_occurrences_inside_the_window_are_masked_too():
    [snippet] = snippets_for(["dose after dose after dose"], "dose")
    assert snippet.masked_text == f"{DEFAULT_MASK} after {DEFAULT_MASK} after {DEFAULT_MASK}"


def test_masking_completeness_property():
    texts = [
        "Heroin is heroin, no HEROIN hides here",
        "a heroin story about heroin" + " filler" * 30,
        "heroin",
    ]
    for snippet in snippets_for(texts, "heroin"):
        assert "heroin" not in normalize(snippet.masked_text)
        assert DEFAULT_MASK in snippet.masked_text


def test_multi_token_terms_mask_the_whole_span():
    [snippet] = snippets_for(["those magic mushrooms again"], "magic mushrooms")
    assert snippet.masked_text == f"those {DEFAULT_MASK} again"


def test_one_snippet_per_post_and_m_cap():
    texts = [f"intro {i} dose outro" for i in range(500)]
    snippets = snippets_for(texts, "dose", max_posts_per_term=100)
    assert len(snippets) == 100
    assert len({s.source_post_id for s in snippets}) == 100


def test_absent_term_yields_nothing():
    assert snippets_for(["nothing relevant"], "dose") == []


def test_surface_independence_on_templated_posts():
    """Two terms in identical contexts leave identical masked snippets."""
    template = "last night the {} hit me hard and fast"
    snippets_a = snippets_for([template.format("snow")], "snow")
    snippets_b = snippets_for([template.format("blow")], "blow")
    assert [s.masked_text for s in snippets_a] == [s.masked_text for s in snippets_b]


def test_mask_collision_is_fatal():
    corpus = corpus_from_texts([f"the word {DEFAULT_MASK} appears here"])
    index = build_index(corpus)
    with pytest.raises(UsageError):
        harvest(index, corpus, "word", ContextConfig())


def test_config_validation():
    with pytest.raises(ValueError):
        ContextConfig(window_chars=-1)
    with pytest.raises(ValueError):
        ContextConfig(mask_token="two words")
    with pytest.raises(ValueError):
        ContextConfig(mask_token="")
    cfg = ContextConfig(window_chars=0)
    assert cfg.window_chars == 0
