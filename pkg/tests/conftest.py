import pytest

from streetlex.corpus import Corpus, Post


def corpus_from_texts(texts, name="test", prefix="p"):
    """Build a corpus whose post ids follow insertion order."""
    return Corpus(name, (Post(post_id=f"{prefix}{i:03d}", text=t) for i, t in enumerate(texts)))


@pytest.fixture
def make_corpus():
    return corpus_from_texts
