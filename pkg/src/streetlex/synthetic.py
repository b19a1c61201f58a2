"""Synthetic forum corpora with planted vocabulary and known links.

Posts are built from sentence templates organized in families. Each
family owns a salient vocabulary shared by both classes but drawn with
opposite frequency orders: words at one end of the ranking lean
substance, the other end leans effect, and the middle is genuinely
ambiguous, so a classifier only separates the classes to the extent it
has seen enough draws to estimate the lean. Planted terms are assigned
one family each, and a configurable share of mentions instead uses
generic wording shared by all classes. Every mention sentence is flanked
by filler sentences so a context window never reaches a post boundary or
another mention. A parallel neutral ("rest") vocabulary appears in
neutral or, for a confusable minority, class-flavored wording. The
generator also plans substance-effect co-mention posts and tallies
exactly what it emitted, so document frequencies and the link matrix are
ground truth by construction. Everything is a pure function of the
SyntheticSpec, including its rng seed: identical SyntheticSpec values
produce byte-identical corpora."""
from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Post, save_corpus
from .errors import UsageError

_CONSONANTS = "bcdfghjklmnpqrstvwz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class SyntheticSpec:
    n_posts: int = 10_000
    n_substances: int = 100
    n_effects: int = 40
    n_rest: int = 100
    families_per_class: int = 6
    noise_rate: float = 0.10
    rng_seed: int = 42
    # shape knobs; the defaults are what the acceptance corpus uses
    filler_vocab_size: int = 700
    salient_pool_size: int = 400
    strong_words_per_class: int = 50
    strong_share: float = 0.2
    strong_zipf: float = 0.7
    patterns_per_family: int = 40
    background_fraction: float = 0.4
    confusable_rest_fraction: float = 0.18
    confusable_mention_rate: float = 0.4

    def __post_init__(self) -> None:
        if self.n_posts < 100:
            raise ValueError("n_posts must be at least 100")
        if min(self.n_substances, self.n_effects) < self.families_per_class:
            raise ValueError("each family needs at least one planted term")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must lie in [0, 1]")


@dataclass
class SyntheticDataset:
    spec: SyntheticSpec
    domain: Corpus
    background: Corpus
    substances: list[str]
    effects: list[str]
    rest: list[str]
    link_matrix: dict[str, dict[str, int]]
    df_ledger: dict[str, int]
    family_of: dict[str, int]
    generic_tokens: list[str]
    confusable_rest: list[str]

    @property
    def gold(self):
        from .evaluation import GoldSet

        return GoldSet(
            substances=frozenset(self.substances),
            effects=frozenset(self.effects),
            rest=frozenset(self.rest),
        )


class _WordFactory:
    def __init__(self, rng: random.Random):
        self._rng = rng
        self._seen: set[str] = set()

    def word(self, syllables: int) -> str:
        for _ in range(10_000):
            candidate = "".join(
                self._rng.choice(_CONSONANTS) + self._rng.choice(_VOWELS)
                for _ in range(syllables)
            )
            if candidate not in self._seen:
                self._seen.add(candidate)
                return candidate
        raise RuntimeError("pseudo-word space exhausted")

    def batch(self, count: int, syllables: int) -> list[str]:
        return [self.word(syllables) for _ in range(count)]


def _zipf_weights(n: int, exponent: float = 0.9) -> list[float]:
    return [1.0 / (rank + 2.0) ** exponent for rank in range(n)]


@dataclass
class _Pattern:
    slots: list[str]  # kind per position: "term", "sal", or "fil"


class _Generator:
    def __init__(self, spec: SyntheticSpec):
        self.spec = spec
        self.rng = random.Random(spec.rng_seed)
        self.factory = _WordFactory(self.rng)

    # -- vocabulary ----------------------------------------------------

    def _allocate_words(self) -> None:
        spec = self.spec
        self.filler = self.factory.batch(spec.filler_vocab_size, 3)
        self.filler_weights = _zipf_weights(len(self.filler))
        self.generic_tokens = self.factory.batch(12, 3)
        self.generic_weights = _zipf_weights(len(self.generic_tokens))
        fam = spec.families_per_class
        # each family pool splits into a substance-strong head, an
        # effect-strong tail, and a large shared ambiguous middle drawn
        # uniformly by both classes; only the strata carry class signal
        self.family_pools = [
            self.factory.batch(spec.salient_pool_size, 3) for _ in range(fam)
        ]
        n_strong = spec.strong_words_per_class
        if 2 * n_strong >= spec.salient_pool_size:
            raise UsageError("strong strata leave no ambiguous middle in the pool")
        self.strong_weights = _zipf_weights(n_strong, spec.strong_zipf)
        self.substances = []
        for i in range(spec.n_substances):
            if i % 10 == 9:
                self.substances.append(self.factory.word(3) + " " + self.factory.word(3))
            else:
                self.substances.append(self.factory.word(3 + i % 2))
        self.effects = [self.factory.word(3 + j % 2) for j in range(spec.n_effects)]
        self.rest = [self.factory.word(3 + r % 2) for r in range(spec.n_rest)]

    def _draw_salient(self, family: int, class_: str) -> str:
        if class_ == "generic":
            return self.rng.choices(self.generic_tokens, self.generic_weights)[0]
        pool = self.family_pools[family]
        n_strong = self.spec.strong_words_per_class
        if self.rng.random() < self.spec.strong_share:
            stratum = pool[:n_strong] if class_ == "substance" else pool[-n_strong:]
            return self.rng.choices(stratum, self.strong_weights)[0]
        return self.rng.choice(pool[n_strong:-n_strong])

    # -- patterns ------------------------------------------------------

    def _build_pattern(self, term_zone: str) -> _Pattern:
        rng = self.rng
        length = rng.randrange(8, 13)
        if term_zone == "early":
            term_pos = rng.randrange(0, max(1, length // 3))
        elif term_zone == "late":
            term_pos = rng.randrange(2 * length // 3, length)
        else:
            term_pos = rng.randrange(length // 3, max(length // 3 + 1, 2 * length // 3))
        slots: list[str] = []
        for pos in range(length):
            if pos == term_pos:
                slots.append("term")
            elif rng.random() < 0.45:
                slots.append("sal")
            else:
                slots.append("fil")
        return _Pattern(slots=slots)

    def _build_patterns(self) -> None:
        spec = self.spec
        fam = spec.families_per_class
        self.sub_patterns = [
            [self._build_pattern("early") for _ in range(spec.patterns_per_family)]
            for _ in range(fam)
        ]
        self.eff_patterns = [
            [self._build_pattern("late") for _ in range(spec.patterns_per_family)]
            for _ in range(fam)
        ]
        self.generic_patterns = [self._build_pattern("mid") for _ in range(14)]
        self.neutral_patterns = self.generic_patterns + [
            self._build_pattern("mid") for _ in range(8)
        ]

    # -- sentences -----------------------------------------------------

    def _instantiate(
        self, pattern: _Pattern, family: int, class_: str, surface: str
    ) -> str:
        rng = self.rng
        tokens: list[str] = []
        for kind in pattern.slots:
            if kind == "term":
                tokens.append(surface)
            elif kind == "sal":
                tokens.append(self._draw_salient(family, class_))
            else:
                tokens.append(rng.choices(self.filler, self.filler_weights)[0])
        sentence = " ".join(tokens)
        return sentence[0].upper() + sentence[1:] + "."

    def _filler_sentence(self) -> str:
        rng = self.rng
        words = [
            rng.choices(self.filler, self.filler_weights)[0]
            for _ in range(rng.randrange(11, 17))
        ]
        sentence = " ".join(words)
        return sentence[0].upper() + sentence[1:] + "."

    def _interleave(self, mentions: list[str]) -> list[str]:
        """Wrap every mention in filler so no context window can reach a
        post boundary or a neighboring mention."""
        sentences = [self._filler_sentence()]
        for mention in mentions:
            sentences.append(mention)
            sentences.append(self._filler_sentence())
        return sentences

    def _mention(self, term: str, class_: str, family: int) -> str:
        rng = self.rng
        if rng.random() < self.spec.noise_rate:
            return self._instantiate(rng.choice(self.generic_patterns), 0, "generic", term)
        if class_ == "substance":
            pattern = rng.choice(self.sub_patterns[family])
        else:
            pattern = rng.choice(self.eff_patterns[family])
        return self._instantiate(pattern, family, class_, term)

    def _rest_mention(self, term: str, r: int, confusable: bool) -> str:
        """Neutral by default; confusable rest terms lean 70/30 toward one
        class so their vote fraction clears a lax theta_c but not a strict
        one."""
        rng = self.rng
        fam = (r // 2) % self.spec.families_per_class
        if confusable and rng.random() < self.spec.confusable_mention_rate:
            majority_is_sub = r % 2 == 0
            if rng.random() < 0.7:
                pick_sub = majority_is_sub
            else:
                pick_sub = not majority_is_sub
            if pick_sub:
                return self._instantiate(rng.choice(self.sub_patterns[fam]), fam, "substance", term)
            return self._instantiate(rng.choice(self.eff_patterns[fam]), fam, "effect", term)
        return self._instantiate(rng.choice(self.neutral_patterns), 0, "generic", term)

    # -- planning ------------------------------------------------------

    def _scaled(self, value: float) -> int:
        return max(6, round(value * self.spec.n_posts / 10_000))

    # head terms of both classes share one df ladder so that the paired
    # seeds at any k contribute equally many training snippets per class
    def _substance_df_plan(self, i: int) -> int:
        if i < 12:
            return self._scaled(560 - 20 * i)
        if i < 40:
            return self._scaled(100 - 2 * i)
        return self._scaled(24)

    def _effect_df_plan(self, j: int) -> int:
        if j < 12:
            return self._scaled(560 - 20 * j)
        return self._scaled(54)

    def _rest_df_plan(self, r: int) -> int:
        return self._scaled(18 + (r % 7))

    def _effect_offsets(self) -> list[int]:
        offsets = []
        for base in (0, 7, 17, 23, 29):
            offset = base % self.spec.n_effects
            while offset in offsets:
                offset = (offset + 1) % self.spec.n_effects
            offsets.append(offset)
        return offsets

    def _link_profile(self, i: int) -> list[tuple[int, int]]:
        """(effect index, co-mention post count) pairs for substance i."""
        scale = self.spec.n_posts / 10_000
        offsets = self._effect_offsets()
        base = (i * 3) % self.spec.n_effects
        counts = [
            max(3, round((10 + i % 4) * scale)),
            max(2, round((7 + i % 2) * scale)),
            max(1, round((4 + (i // 2) % 2) * scale)),
            1,
            1,
        ]
        return [
            ((base + offsets[k]) % self.spec.n_effects, counts[k]) for k in range(5)
        ]

    # -- assembly ------------------------------------------------------

    def _pack_mentions(self, requests: list[tuple[str, int]], max_group: int = 3) -> list[list[tuple[str, int]]]:
        """Group (term, family) mention requests into posts of 1..max_group
        distinct terms."""
        rng = self.rng
        stream = list(requests)
        rng.shuffle(stream)
        groups: list[list[tuple[str, int]]] = []
        current: list[tuple[str, int]] = []
        target = rng.choices(range(1, max_group + 1), (0.35, 0.45, 0.2)[:max_group])[0]
        for item in stream:
            if any(item[0] == existing[0] for existing in current):
                groups.append(current)
                current = [item]
                target = rng.choices(range(1, max_group + 1), (0.35, 0.45, 0.2)[:max_group])[0]
                continue
            current.append(item)
            if len(current) >= target:
                groups.append(current)
                current = []
                target = rng.choices(range(1, max_group + 1), (0.35, 0.45, 0.2)[:max_group])[0]
        if current:
            groups.append(current)
        return groups

    def generate(self, swap_substances: tuple[int, int] | None = None) -> SyntheticDataset:
        spec = self.spec
        self._allocate_words()
        if swap_substances is not None:
            i, j = swap_substances
            if i == j or not (0 <= i < len(self.substances) and 0 <= j < len(self.substances)):
                raise UsageError("swap_substances must name two distinct planted substances")
            self.substances[i], self.substances[j] = self.substances[j], self.substances[i]
        self._build_patterns()

        fam = spec.families_per_class
        sub_family = {term: i % fam for i, term in enumerate(self.substances)}
        eff_family = {term: j % fam for j, term in enumerate(self.effects)}

        posts: list[tuple[list[str], set[str]]] = []

        # co-mention posts drive the link matrix
        co_counts_sub: Counter = Counter()
        co_counts_eff: Counter = Counter()
        for i, substance in enumerate(self.substances):
            for eff_idx, count in self._link_profile(i):
                effect = self.effects[eff_idx]
                for _ in range(count):
                    mentions = [
                        self._mention(substance, "substance", sub_family[substance]),
                        self._mention(effect, "effect", eff_family[effect]),
                    ]
                    self.rng.shuffle(mentions)
                    posts.append((self._interleave(mentions), {substance, effect}))
                co_counts_sub[substance] += count
                co_counts_eff[effect] += count

        # solo mentions, packed with same-class company only
        sub_requests = []
        for i, substance in enumerate(self.substances):
            solo = max(self._substance_df_plan(i) - co_counts_sub[substance], 2)
            sub_requests.extend([(substance, sub_family[substance])] * solo)
        for group in self._pack_mentions(sub_requests):
            mentions = [self._mention(t, "substance", f) for t, f in group]
            posts.append((self._interleave(mentions), {t for t, _ in group}))

        eff_requests = []
        for j, effect in enumerate(self.effects):
            solo = max(self._effect_df_plan(j) - co_counts_eff[effect], 2)
            eff_requests.extend([(effect, eff_family[effect])] * solo)
        for group in self._pack_mentions(eff_requests):
            mentions = [self._mention(t, "effect", f) for t, f in group]
            posts.append((self._interleave(mentions), {t for t, _ in group}))

        n_confusable = round(spec.n_rest * spec.confusable_rest_fraction)
        confusable_rest = self.rest[:n_confusable]
        rest_requests = []
        for r, term in enumerate(self.rest):
            rest_requests.extend([(term, r)] * self._rest_df_plan(r))
        confusable_set = set(confusable_rest)
        for group in self._pack_mentions(rest_requests, max_group=2):
            mentions = [self._rest_mention(t, r, t in confusable_set) for t, r in group]
            posts.append((self._interleave(mentions), {t for t, _ in group}))

        if len(posts) > spec.n_posts:
            raise UsageError(
                f"n_posts={spec.n_posts} too small: the planted vocabulary needs {len(posts)} posts"
            )
        while len(posts) < spec.n_posts:
            sentences = [self._filler_sentence() for _ in range(self.rng.randrange(1, 4))]
            posts.append((sentences, set()))

        self.rng.shuffle(posts)
        domain = Corpus("synthetic-domain")
        user_pool = max(40, spec.n_posts // 12)
        df_ledger: Counter = Counter()
        matrix: dict[str, dict[str, int]] = {}
        substance_set = set(self.substances)
        effect_set = set(self.effects)
        for seq, (sentences, terms) in enumerate(posts):
            domain.add(
                Post(
                    post_id=f"d{seq:06d}",
                    text=" ".join(sentences),
                    thread_id=f"t{seq // 8:05d}",
                    user_id=f"u{self.rng.randrange(user_pool):05d}",
                )
            )
            for term in terms:
                df_ledger[term] += 1
            for substance in sorted(terms & substance_set):
                for effect in sorted(terms & effect_set):
                    matrix.setdefault(substance, {})
                    matrix[substance][effect] = matrix[substance].get(effect, 0) + 1

        background = Corpus("synthetic-background")
        n_background = max(50, round(spec.n_posts * spec.background_fraction))
        for seq in range(n_background):
            sentences = [
                self._filler_sentence() for _ in range(self.rng.randrange(1, 4))
            ]
            background.add(Post(post_id=f"b{seq:06d}", text=" ".join(sentences)))

        family_of = dict(sub_family)
        family_of.update(eff_family)
        return SyntheticDataset(
            spec=spec,
            domain=domain,
            background=background,
            substances=list(self.substances),
            effects=list(self.effects),
            rest=list(self.rest),
            link_matrix=matrix,
            df_ledger=dict(df_ledger),
            family_of=family_of,
            generic_tokens=list(self.generic_tokens),
            confusable_rest=list(confusable_rest),
        )


def generate_synthetic(
    spec: SyntheticSpec, swap_substances: tuple[int, int] | None = None
) -> SyntheticDataset:
    """Build a synthetic dataset. ``swap_substances=(i, j)`` exchanges the
    surface strings of two planted substances without touching any other
    generator draw, for surface-independence experiments."""
    return _Generator(spec).generate(swap_substances)


def write_dataset(dataset: SyntheticDataset, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"artifact": "synthetic-corpus", "rng_seed": dataset.spec.rng_seed}
    save_corpus(dataset.domain, out / "domain.jsonl", meta=meta)
    save_corpus(dataset.background, out / "background.jsonl", meta=meta)
    (out / "gold_substances.txt").write_text(
        "\n".join(dataset.substances) + "\n", encoding="utf-8"
    )
    (out / "gold_effects.txt").write_text("\n".join(dataset.effects) + "\n", encoding="utf-8")
    (out / "gold_rest.txt").write_text("\n".join(dataset.rest) + "\n", encoding="utf-8")
    rows = ["substance\teffect\tcount"]
    for substance in sorted(dataset.link_matrix):
        links = dataset.link_matrix[substance]
        for effect in sorted(links, key=lambda e: (-links[e], e)):
            rows.append(f"{substance}\t{effect}\t{links[effect]}")
    (out / "link_matrix.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    (out / "dataset_meta.json").write_text(
        json.dumps(
            {
                "spec": dataset.spec.__dict__,
                "doc_count": dataset.domain.doc_count,
                "background_doc_count": dataset.background.doc_count,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
