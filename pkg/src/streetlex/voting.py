"""Term-level classification by thresholded voting.

A term's harvested contexts each cast a vote. Votes below the confidence
floor theta_p are discarded; the plurality class wins only when it holds
at least (by default; the comparison is configurable) a theta_c share of
the retained votes. Anything else stays Unassigned: no votes, a tie, or a
too-thin plurality."""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .classifier import LABEL_EFFECT, LABEL_SUBSTANCE, ContextModel, ContextPrediction
from .context import ContextConfig, harvest
from .corpus import Corpus
from .errors import DataFormatError, UsageError
from .index import Index
from .text import normalize_term

UNASSIGNED = "Unassigned"


@dataclass(frozen=True)
class VoteConfig:
    theta_p: float = 0.8
    theta_c: float = 0.6
    contexts_per_term: int = 100
    inclusive_theta_c: bool = True  # ">=" when True, strict ">" otherwise

    def __post_init__(self) -> None:
        if not (0.0 <= self.theta_p <= 1.0 and 0.0 <= self.theta_c <= 1.0):
            raise ValueError("thresholds must lie in [0, 1]")
        if self.contexts_per_term < 0:
            raise ValueError("contexts_per_term must be >= 0")


@dataclass(frozen=True)
class TermDecision:
    term: str
    label: str
    n_fetched: int
    n_retained: int
    votes_substance: int
    votes_effect: int
    winning_fraction: float


def tally_votes(
    term: str, predictions: list[ContextPrediction], cfg: VoteConfig, n_fetched: int | None = None
) -> TermDecision:
    """Pure voting arithmetic over per-context predictions."""
    retained = [p for p in predictions if p.confidence >= cfg.theta_p]
    votes = {LABEL_SUBSTANCE: 0, LABEL_EFFECT: 0}
    for p in retained:
        votes[p.label] += 1
    total = len(retained)
    fetched = len(predictions) if n_fetched is None else n_fetched

    if total == 0:
        return TermDecision(term, UNASSIGNED, fetched, 0, 0, 0, 0.0)

    top = max(votes.values())
    winners = [label for label, count in votes.items() if count == top]
    fraction = top / total
    if len(winners) != 1:
        label = UNASSIGNED
    else:
        passed = fraction >= cfg.theta_c if cfg.inclusive_theta_c else fraction > cfg.theta_c
        label = winners[0] if passed else UNASSIGNED
    return TermDecision(
        term=term,
        label=label,
        n_fetched=fetched,
        n_retained=total,
        votes_substance=votes[LABEL_SUBSTANCE],
        votes_effect=votes[LABEL_EFFECT],
        winning_fraction=fraction,
    )


def classify_term(
    candidate: str,
    model: ContextModel,
    index: Index,
    corpus: Corpus,
    ctx_cfg: ContextConfig,
    vote_cfg: VoteConfig,
) -> TermDecision:
    surface = normalize_term(candidate)
    if not surface:
        raise UsageError(f"candidate {candidate!r} normalizes to no tokens")
    fetch_cfg = replace(ctx_cfg, max_posts_per_term=vote_cfg.contexts_per_term)
    snippets = harvest(index, corpus, surface, fetch_cfg)
    predictions = model.predict_many(snippets)
    return tally_votes(surface, predictions, vote_cfg, n_fetched=len(snippets))


def classify_all(
    candidates: list[str],
    model: ContextModel,
    index: Index,
    corpus: Corpus,
    ctx_cfg: ContextConfig,
    vote_cfg: VoteConfig,
) -> list[TermDecision]:
    """Decisions in input order; duplicate candidates get identical decisions."""
    cache: dict[str, TermDecision] = {}
    decisions = []
    for candidate in candidates:
        surface = normalize_term(candidate)
        if surface not in cache:
            cache[surface] = classify_term(surface, model, index, corpus, ctx_cfg, vote_cfg)
        decisions.append(cache[surface])
    return decisions


def write_lexicon_tsv(decisions: list[TermDecision], path: str | Path, header_lines: list[str] | None = None) -> None:
    path = Path(path)
    lines = [f"# {line}" for line in (header_lines or [])]
    lines.append(
        "term\tlabel\tn_fetched\tn_retained\tvotes_substance\tvotes_effect\twinning_fraction"
    )
    for d in decisions:
        lines.append(
            f"{d.term}\t{d.label}\t{d.n_fetched}\t{d.n_retained}"
            f"\t{d.votes_substance}\t{d.votes_effect}\t{d.winning_fraction:.6f}"
        )
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    tmp.replace(path)


def read_lexicon_tsv(path: str | Path) -> list[TermDecision]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read lexicon {path}: {exc}") from exc
    decisions = []
    for line in lines:
        if not line or line.startswith("#") or line.startswith("term\t"):
            continue
        parts = line.split("\t")
        if len(parts) != 7:
            raise DataFormatError(f"bad lexicon row in {path}: {line!r}")
        decisions.append(
            TermDecision(
                term=parts[0],
                label=parts[1],
                n_fetched=int(parts[2]),
                n_retained=int(parts[3]),
                votes_substance=int(parts[4]),
                votes_effect=int(parts[5]),
                winning_fraction=float(parts[6]),
            )
        )
    return decisions
