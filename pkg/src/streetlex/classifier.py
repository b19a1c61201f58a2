"""Context classifier: tells substance windows from effect windows.

Training data comes from seed terms. Seeds are consumed most-frequent
first (maximum document frequency, i.e. increasing idf), so the earliest
seeds contribute the most varied contexts. Snippets are featurized as
tf-weighted, l2-normalized bags of tokens with the mask token excluded;
the mask position enters through two bucketed distance features instead.

The margin model is a linear SVM; confidences come from a slope-only
sigmoid fitted on cross-validated margins. Keeping the intercept out of
both the SVM and the sigmoid pins an all-zero feature vector to a
confidence of exactly 0.5."""
from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from sklearn.svm import LinearSVC

from .context import ContextConfig, ContextSnippet, harvest
from .corpus import Corpus
from .errors import (
    ArtifactVersionError,
    NoUnusedSeedsError,
    SeedsNotInCorpusError,
    UsageError,
)
from .index import Index
from .text import normalize_term, tokenize

logger = logging.getLogger(__name__)

LABEL_SUBSTANCE = "Substance"
LABEL_EFFECT = "Effect"

MODEL_MAGIC = "streetlex-model"
MODEL_VERSION = 1

_POSITION_BUCKETS = ((0, "0"), (1, "1"), (3, "2-3"), (7, "4-7"), (15, "8-15"))


@dataclass(frozen=True)
class SeedList:
    class_label: str
    terms: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.terms)) != len(self.terms):
            raise ValueError(f"duplicate seeds in {self.class_label} list")


def load_seed_list(path: str | Path, class_label: str) -> SeedList:
    """One term per line; blank lines and ``#`` comments are ignored."""
    path = Path(path)
    try:
        raw_lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read seed list {path}: {exc}") from exc
    terms = []
    seen = set()
    for raw in raw_lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        surface = normalize_term(line)
        if not surface:
            raise UsageError(f"seed {line!r} in {path} normalizes to nothing")
        if surface in seen:
            raise UsageError(f"duplicate seed {surface!r} in {path}")
        seen.add(surface)
        terms.append(surface)
    return SeedList(class_label=class_label, terms=tuple(terms))


def load_seed_lists(substance_path: str | Path, effect_path: str | Path) -> tuple[SeedList, SeedList]:
    substances = load_seed_list(substance_path, LABEL_SUBSTANCE)
    effects = load_seed_list(effect_path, LABEL_EFFECT)
    overlap = set(substances.terms) & set(effects.terms)
    if overlap:
        raise UsageError(f"seed lists overlap: {sorted(overlap)}")
    return substances, effects


def idf(doc_count: int, df: int) -> float:
    if doc_count <= 0 or df <= 0:
        raise ValueError("doc_count and df must be positive")
    return math.log(doc_count / df)


def select_next_seed(seed_list: SeedList, used: set[str], index: Index) -> str:
    """The unused seed occurring in the most posts; ties break lexicographically."""
    best: tuple[int, str] | None = None
    any_unused = False
    for term in seed_list.terms:
        if term in used:
            continue
        any_unused = True
        df = index.doc_frequency(term)
        if df <= 0:
            continue
        key = (df, term)
        if best is None or df > best[0] or (df == best[0] and term < best[1]):
            best = key
    if not any_unused:
        raise NoUnusedSeedsError(f"all {seed_list.class_label} seeds have been used")
    if best is None:
        raise SeedsNotInCorpusError(
            f"no unused {seed_list.class_label} seed occurs in the corpus"
        )
    return best[1]


@dataclass
class TrainingSet:
    t_substance: list[ContextSnippet]
    t_effect: list[ContextSnippet]
    seeds_used: dict[str, list[str]] = field(default_factory=dict)


def build_training_set(
    index: Index,
    corpus: Corpus,
    substance_seeds: list[str],
    effect_seeds: list[str],
    ctx_cfg: ContextConfig,
) -> TrainingSet:
    t_s: list[ContextSnippet] = []
    t_e: list[ContextSnippet] = []
    for seed in substance_seeds:
        t_s.extend(harvest(index, corpus, seed, ctx_cfg))
    for seed in effect_seeds:
        t_e.extend(harvest(index, corpus, seed, ctx_cfg))
    return TrainingSet(
        t_substance=t_s,
        t_effect=t_e,
        seeds_used={LABEL_SUBSTANCE: list(substance_seeds), LABEL_EFFECT: list(effect_seeds)},
    )


def _position_bucket(distance: int) -> str:
    for upper, name in _POSITION_BUCKETS:
        if distance <= upper:
            return name
    return "16+"


def _raw_features(masked_text: str, mask_norm: str) -> dict[str, float]:
    tokens = tokenize(masked_text)
    features: dict[str, float] = {}
    mask_pos = -1
    for pos, token in enumerate(tokens):
        if token == mask_norm:
            if mask_pos < 0:
                mask_pos = pos
            continue
        features[token] = features.get(token, 0.0) + 1.0
    if mask_pos >= 0:
        features[f"#start={_position_bucket(mask_pos)}"] = 1.0
        features[f"#end={_position_bucket(len(tokens) - 1 - mask_pos)}"] = 1.0
    return features


def featurize(snippet: ContextSnippet, vocabulary: dict[str, int], mask_token: str) -> dict[int, float]:
    """Sparse l2-normalized feature vector. Out-of-vocabulary tokens drop out,
    so an all-unknown snippet legally becomes the zero vector."""
    raw = _raw_features(snippet.masked_text, normalize_term(mask_token))
    vector = {}
    for name, value in raw.items():
        idx = vocabulary.get(name)
        if idx is not None:
            vector[idx] = vector.get(idx, 0.0) + value
    norm = math.sqrt(sum(v * v for v in vector.values()))
    if norm > 0:
        vector = {i: v / norm for i, v in vector.items()}
    return vector


def _to_csr(vectors: list[dict[int, float]], n_features: int) -> csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for vector in vectors:
        for idx in sorted(vector):
            indices.append(idx)
            data.append(vector[idx])
        indptr.append(len(indices))
    return csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(vectors), n_features),
    )


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def _fit_slope(margins: np.ndarray, labels: np.ndarray) -> float:
    """Slope of the centered sigmoid sigma(a*m), by Newton on the log loss."""
    if len(margins) == 0:
        return 1.0
    a = 1.0
    for _ in range(100):
        p = 1.0 / (1.0 + np.exp(-np.clip(a * margins, -500, 500)))
        grad = float(np.dot(p - labels, margins))
        hess = float(np.dot(p * (1.0 - p), margins * margins))
        if hess <= 1e-12:
            break
        step = grad / hess
        a_next = min(max(a - step, 1e-3), 1e3)
        if abs(a_next - a) < 1e-10:
            a = a_next
            break
        a = a_next
    return a


def _stratified_folds(labels: np.ndarray, n_folds: int, seed: int) -> list[np.ndarray]:
    rng = random.Random(seed)
    folds: list[list[int]] = [[] for _ in range(n_folds)]
    for value in (1, 0):
        members = [int(i) for i in np.flatnonzero(labels == value)]
        rng.shuffle(members)
        for j, idx in enumerate(members):
            folds[j % n_folds].append(idx)
    return [np.asarray(sorted(fold), dtype=np.int64) for fold in folds]


@dataclass(frozen=True)
class TrainingConfig:
    svm_c: float = 1.0
    calibration_folds: int = 3
    rng_seed: int = 0
    max_iter: int = 20000


@dataclass(frozen=True)
class ContextPrediction:
    label: str
    confidence: float


class ContextModel:
    """Linear margin model with calibrated confidences.

    The single weight vector scores the Substance class; the Effect score
    is its negation, so per-class confidences always sum to one."""

    def __init__(
        self,
        vocabulary: dict[str, int],
        weights: np.ndarray,
        slope: float,
        mask_token: str,
        metadata: dict | None = None,
    ):
        self.vocabulary = vocabulary
        self.weights = np.asarray(weights, dtype=np.float64)
        self.slope = slope
        self.mask_token = mask_token
        self.metadata = metadata or {}
        self.classes = (LABEL_SUBSTANCE, LABEL_EFFECT)

    def margin(self, snippet: ContextSnippet) -> float:
        vector = featurize(snippet, self.vocabulary, self.mask_token)
        return float(sum(self.weights[i] * v for i, v in vector.items()))

    def _decide(self, margin: float) -> ContextPrediction:
        p_substance = _sigmoid(self.slope * margin)
        if margin >= 0:
            return ContextPrediction(LABEL_SUBSTANCE, p_substance)
        return ContextPrediction(LABEL_EFFECT, 1.0 - p_substance)

    def predict(self, snippet: ContextSnippet) -> ContextPrediction:
        return self._decide(self.margin(snippet))

    def predict_many(self, snippets: list[ContextSnippet]) -> list[ContextPrediction]:
        if not snippets:
            return []
        vectors = [featurize(s, self.vocabulary, self.mask_token) for s in snippets]
        matrix = _to_csr(vectors, len(self.vocabulary))
        margins = matrix @ self.weights
        return [self._decide(float(m)) for m in margins]

    def save(self, path: str | Path) -> None:
        payload = {
            "magic": MODEL_MAGIC,
            "version": MODEL_VERSION,
            "classes": list(self.classes),
            "mask_token": self.mask_token,
            "vocabulary": self.vocabulary,
            "weights": [float(w) for w in self.weights],
            "calibration": {"slope": float(self.slope)},
            "metadata": self.metadata,
        }
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with tmp.open("w", encoding="utf-8") as handle:
            json.dump(payload, handle, sort_keys=True, separators=(",", ":"))
        tmp.replace(path)

    @classmethod
    def load(cls, path: str | Path) -> "ContextModel":
        path = Path(path)
        try:
            with path.open("r", encoding="utf-8") as handle:
                payload = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read model {path}: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("magic") != MODEL_MAGIC:
            raise ArtifactVersionError(f"{path} is not a model file")
        if payload.get("version") != MODEL_VERSION:
            raise ArtifactVersionError(
                f"model version {payload.get('version')} unsupported (expected {MODEL_VERSION})"
            )
        return cls(
            vocabulary=payload["vocabulary"],
            weights=np.asarray(payload["weights"], dtype=np.float64),
            slope=payload["calibration"]["slope"],
            mask_token=payload["mask_token"],
            metadata=payload.get("metadata", {}),
        )


def _fit_svm(matrix: csr_matrix, labels: np.ndarray, hyper: TrainingConfig) -> np.ndarray:
    clf = LinearSVC(
        C=hyper.svm_c,
        fit_intercept=False,
        dual=True,
        random_state=hyper.rng_seed,
        max_iter=hyper.max_iter,
        tol=1e-5,
    )
    clf.fit(matrix, labels)
    return clf.coef_[0].astype(np.float64)


def train(
    t_substance: list[ContextSnippet],
    t_effect: list[ContextSnippet],
    hyper: TrainingConfig = TrainingConfig(),
    *,
    mask_token: str,
    metadata: dict | None = None,
) -> ContextModel:
    """Fit the margin model plus calibration on harvested seed contexts."""
    if not t_substance or not t_effect:
        raise UsageError("both classes need at least one training snippet")
    total = len(t_substance) + len(t_effect)
    if total < 10:
        logger.warning("training on only %d snippets; expect a weak model", total)

    mask_norm = normalize_term(mask_token)
    snippets = list(t_substance) + list(t_effect)
    labels = np.concatenate(
        [np.ones(len(t_substance)), np.zeros(len(t_effect))]
    )
    names: set[str] = set()
    raw_vectors = []
    for snippet in snippets:
        raw = _raw_features(snippet.masked_text, mask_norm)
        raw_vectors.append(raw)
        names.update(raw)
    vocabulary = {name: i for i, name in enumerate(sorted(names))}

    vectors = []
    for raw in raw_vectors:
        norm = math.sqrt(sum(v * v for v in raw.values()))
        vectors.append(
            {vocabulary[n]: v / norm for n, v in raw.items()} if norm > 0 else {}
        )
    matrix = _to_csr(vectors, len(vocabulary))

    min_class = min(len(t_substance), len(t_effect))
    n_folds = min(hyper.calibration_folds, min_class)
    if n_folds >= 2:
        folds = _stratified_folds(labels, n_folds, hyper.rng_seed)
        margin_parts = []
        label_parts = []
        for held_out in folds:
            mask = np.ones(len(labels), dtype=bool)
            mask[held_out] = False
            if len(np.unique(labels[mask])) < 2:
                continue
            w = _fit_svm(matrix[mask], labels[mask], hyper)
            margin_parts.append(matrix[held_out] @ w)
            label_parts.append(labels[held_out])
        cal_margins = np.concatenate(margin_parts) if margin_parts else np.zeros(0)
        cal_labels = np.concatenate(label_parts) if label_parts else np.zeros(0)
    else:
        logger.warning("too few snippets for cross-validated calibration")
        w = _fit_svm(matrix, labels, hyper)
        cal_margins = matrix @ w
        cal_labels = labels

    weights = _fit_svm(matrix, labels, hyper)
    slope = _fit_slope(np.asarray(cal_margins, dtype=np.float64), cal_labels)

    info = dict(metadata or {})
    info.setdefault("n_substance", len(t_substance))
    info.setdefault("n_effect", len(t_effect))
    info.setdefault("svm_c", hyper.svm_c)
    info.setdefault("rng_seed", hyper.rng_seed)
    return ContextModel(
        vocabulary=vocabulary,
        weights=weights,
        slope=slope,
        mask_token=mask_token,
        metadata=info,
    )
