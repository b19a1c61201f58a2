"""Evaluation harness: micro-averaged metrics and parameter sweeps.

Scoring follows the usual micro-averaged convention over the two real
classes. Gold terms left Unassigned are false negatives; any class
assigned to a neutral ("rest") gold term is a false positive; neutral
terms left Unassigned contribute nothing. Terms outside the gold lists
are excluded before scoring, and terms used as seeds never enter the
evaluation set."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

from .classifier import (
    LABEL_EFFECT,
    LABEL_SUBSTANCE,
    ContextModel,
    SeedList,
    TrainingConfig,
    build_training_set,
    select_next_seed,
    train,
)
from .context import ContextConfig, harvest
from .corpus import Corpus
from .errors import SeedsNotInCorpusError, UsageError
from .index import Index
from .text import normalize_term
from .voting import TermDecision, VoteConfig, tally_votes

CLASS_LABELS = (LABEL_SUBSTANCE, LABEL_EFFECT)


@dataclass(frozen=True)
class GoldSet:
    substances: frozenset[str]
    effects: frozenset[str]
    rest: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if (self.substances & self.effects) or (self.substances & self.rest) or (
            self.effects & self.rest
        ):
            raise ValueError("gold lists must be pairwise disjoint")

    def label_of(self, term: str) -> str | None:
        if term in self.substances:
            return LABEL_SUBSTANCE
        if term in self.effects:
            return LABEL_EFFECT
        if term in self.rest:
            return "rest"
        return None

    def universe(self) -> frozenset[str]:
        return self.substances | self.effects | self.rest


def _load_term_file(path: str | Path) -> frozenset[str]:
    path = Path(path)
    try:
        raw_lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read gold list {path}: {exc}") from exc
    terms = set()
    for raw in raw_lines:
        line = raw.split("#", 1)[0].strip()
        if line:
            surface = normalize_term(line)
            if surface:
                terms.add(surface)
    return frozenset(terms)


def load_gold(
    substances_path: str | Path,
    effects_path: str | Path,
    rest_path: str | Path | None = None,
) -> GoldSet:
    return GoldSet(
        substances=_load_term_file(substances_path),
        effects=_load_term_file(effects_path),
        rest=_load_term_file(rest_path) if rest_path else frozenset(),
    )


@dataclass
class MetricsReport:
    tp: dict[str, int]
    fp: dict[str, int]
    fn: dict[str, int]
    precision: float
    recall: float
    f1: float
    n_scored: int
    config: dict = field(default_factory=dict)


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def micro_prf(decisions: list[TermDecision], gold: GoldSet, config: dict | None = None) -> MetricsReport:
    universe = gold.universe()
    tp = {label: 0 for label in CLASS_LABELS}
    fp = {label: 0 for label in CLASS_LABELS}
    fn = {label: 0 for label in CLASS_LABELS}
    n_scored = 0
    for decision in decisions:
        truth = gold.label_of(decision.term)
        if truth is None or decision.term not in universe:
            continue
        n_scored += 1
        predicted = decision.label
        if predicted in CLASS_LABELS:
            if predicted == truth:
                tp[predicted] += 1
            else:
                fp[predicted] += 1
                if truth in CLASS_LABELS:
                    fn[truth] += 1
        elif truth in CLASS_LABELS:
            fn[truth] += 1
    total_tp = sum(tp.values())
    total_fp = sum(fp.values())
    total_fn = sum(fn.values())
    precision = total_tp / (total_tp + total_fp) if total_tp + total_fp else 0.0
    recall = total_tp / (total_tp + total_fn) if total_tp + total_fn else 0.0
    return MetricsReport(
        tp=tp,
        fp=fp,
        fn=fn,
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        n_scored=n_scored,
        config=dict(config or {}),
    )


@dataclass
class SweepPoint:
    sweep_param: str
    value: float
    report: MetricsReport


def write_sweep_csv(points: list[SweepPoint], path: str | Path, header_lines: list[str] | None = None) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="") as handle:
        for line in header_lines or []:
            handle.write(f"# {line}\n")
        writer = csv.writer(handle)
        writer.writerow(["sweep_param", "value", "recall", "precision", "f1"])
        for point in points:
            writer.writerow(
                [
                    point.sweep_param,
                    point.value,
                    f"{point.report.recall:.6f}",
                    f"{point.report.precision:.6f}",
                    f"{point.report.f1:.6f}",
                ]
            )
    tmp.replace(path)


def write_metrics_csv(report: MetricsReport, path: str | Path, header_lines: list[str] | None = None) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="") as handle:
        for line in header_lines or []:
            handle.write(f"# {line}\n")
        writer = csv.writer(handle)
        writer.writerow(["scope", "tp", "fp", "fn", "precision", "recall", "f1"])
        for label in CLASS_LABELS:
            tp, fp, fn = report.tp[label], report.fp[label], report.fn[label]
            p = tp / (tp + fp) if tp + fp else 0.0
            r = tp / (tp + fn) if tp + fn else 0.0
            writer.writerow([label, tp, fp, fn, f"{p:.6f}", f"{r:.6f}", f"{f1_score(p, r):.6f}"])
        writer.writerow(
            [
                "micro",
                sum(report.tp.values()),
                sum(report.fp.values()),
                sum(report.fn.values()),
                f"{report.precision:.6f}",
                f"{report.recall:.6f}",
                f"{report.f1:.6f}",
            ]
        )
    tmp.replace(path)


class ExperimentRunner:
    """Runs the train/classify/score loop over one corpus, with caching so
    that sweeps re-train only when the training inputs actually change."""

    def __init__(
        self,
        *,
        corpus: Corpus,
        index: Index,
        gold: GoldSet,
        substance_seeds: SeedList,
        effect_seeds: SeedList,
        candidate_surfaces: list[str],
        ctx_cfg: ContextConfig = ContextConfig(),
        train_cfg: TrainingConfig = TrainingConfig(),
    ):
        self.corpus = corpus
        self.index = index
        self.gold = gold
        self.substance_seeds = substance_seeds
        self.effect_seeds = effect_seeds
        self.candidates = set(candidate_surfaces)
        self.ctx_cfg = ctx_cfg
        self.train_cfg = train_cfg
        self._seed_order: dict[str, list[str]] = {}
        self._models: dict[tuple[int, int], ContextModel] = {}
        self._predictions: dict[tuple, list] = {}

    def seeds_for(self, k: int) -> tuple[list[str], list[str]]:
        """The first k seeds per class, consumed most-frequent first."""
        out = []
        for seed_list in (self.substance_seeds, self.effect_seeds):
            order = self._seed_order.setdefault(seed_list.class_label, [])
            while len(order) < k:
                try:
                    order.append(select_next_seed(seed_list, set(order), self.index))
                except SeedsNotInCorpusError:
                    raise UsageError(
                        f"not enough usable {seed_list.class_label} seeds for k={k}"
                    )
            out.append(order[:k])
        return out[0], out[1]

    def model_for(self, k: int, contexts_per_seed: int) -> ContextModel:
        key = (k, contexts_per_seed)
        if key not in self._models:
            subs, effs = self.seeds_for(k)
            ctx = replace(self.ctx_cfg, max_posts_per_term=contexts_per_seed)
            training = build_training_set(self.index, self.corpus, subs, effs, ctx)
            self._models[key] = train(
                training.t_substance,
                training.t_effect,
                self.train_cfg,
                mask_token=self.ctx_cfg.mask_token,
                metadata={"seeds": training.seeds_used, "contexts_per_seed": contexts_per_seed},
            )
        return self._models[key]

    def eval_terms(self, k: int, include_rest: bool) -> list[str]:
        subs, effs = self.seeds_for(k)
        held_out = set(subs) | set(effs)
        pool = self.gold.substances | self.gold.effects
        if include_rest:
            pool = pool | self.gold.rest
        return sorted((pool & self.candidates) - held_out)

    def _predict_term(self, k: int, cps: int, term: str, cpt: int):
        # harvest+predict once per configuration; re-tally under any
        # thresholds later without touching the model again
        key = (k, cps, cpt, term)
        if key not in self._predictions:
            model = self.model_for(k, cps)
            fetch_cfg = replace(self.ctx_cfg, max_posts_per_term=cpt)
            snippets = harvest(self.index, self.corpus, term, fetch_cfg)
            self._predictions[key] = model.predict_many(snippets)
        return self._predictions[key]

    def decisions(
        self,
        k: int,
        vote_cfg: VoteConfig,
        *,
        contexts_per_seed: int = 3000,
        include_rest: bool = False,
    ) -> list[TermDecision]:
        terms = self.eval_terms(k, include_rest)
        out = []
        for term in terms:
            predictions = self._predict_term(k, contexts_per_seed, term, vote_cfg.contexts_per_term)
            out.append(tally_votes(term, predictions, vote_cfg))
        return out

    def report(
        self,
        k: int,
        vote_cfg: VoteConfig,
        *,
        contexts_per_seed: int = 3000,
        include_rest: bool = False,
    ) -> MetricsReport:
        decisions = self.decisions(
            k, vote_cfg, contexts_per_seed=contexts_per_seed, include_rest=include_rest
        )
        config = {
            "seeds_per_class": k,
            "contexts_per_seed": contexts_per_seed,
            "contexts_per_term": vote_cfg.contexts_per_term,
            "theta_p": vote_cfg.theta_p,
            "theta_c": vote_cfg.theta_c,
            "include_rest": include_rest,
        }
        return micro_prf(decisions, self.gold, config=config)


def sweep_seeds(
    runner: ExperimentRunner,
    k_max: int,
    vote_cfg: VoteConfig,
    *,
    contexts_per_seed: int = 3000,
    include_rest: bool = False,
) -> list[SweepPoint]:
    return [
        SweepPoint(
            "seeds_per_class",
            k,
            runner.report(
                k, vote_cfg, contexts_per_seed=contexts_per_seed, include_rest=include_rest
            ),
        )
        for k in range(1, k_max + 1)
    ]


def sweep_theta_c(
    runner: ExperimentRunner,
    values: list[float],
    k: int,
    vote_cfg: VoteConfig,
    *,
    contexts_per_seed: int = 3000,
    include_rest: bool = False,
) -> list[SweepPoint]:
    return [
        SweepPoint(
            "theta_c",
            value,
            runner.report(
                k,
                replace(vote_cfg, theta_c=value),
                contexts_per_seed=contexts_per_seed,
                include_rest=include_rest,
            ),
        )
        for value in values
    ]


def sweep_contexts_per_seed(
    runner: ExperimentRunner,
    values: list[int],
    k: int,
    vote_cfg: VoteConfig,
    *,
    include_rest: bool = False,
) -> list[SweepPoint]:
    return [
        SweepPoint(
            "contexts_per_seed",
            value,
            runner.report(k, vote_cfg, contexts_per_seed=value, include_rest=include_rest),
        )
        for value in values
    ]


def sweep_contexts_per_term(
    runner: ExperimentRunner,
    values: list[int],
    k: int,
    vote_cfg: VoteConfig,
    *,
    contexts_per_seed: int = 3000,
    include_rest: bool = False,
) -> list[SweepPoint]:
    return [
        SweepPoint(
            "contexts_per_term",
            value,
            runner.report(
                k,
                replace(vote_cfg, contexts_per_term=value),
                contexts_per_seed=contexts_per_seed,
                include_rest=include_rest,
            ),
        )
        for value in values
    ]
