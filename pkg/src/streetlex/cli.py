"""Command-line pipeline driver.

Stages write their artifacts into a shared workspace directory and refuse
inputs whose recorded configuration lineage disagrees with the effective
flags. Exit codes: 0 on success, 1 for usage and data errors, 2 for
internal failures."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .classifier import (
    LABEL_EFFECT,
    LABEL_SUBSTANCE,
    ContextModel,
    TrainingConfig,
    build_training_set,
    load_seed_lists,
    select_next_seed,
    train,
)
from .config import (
    PipelineConfig,
    artifact_header,
    config_fingerprint,
    file_fingerprint,
    read_artifact_header,
    require_matching_hash,
)
from .context import ContextConfig
from .corpus import ingest, save_corpus
from .errors import ConfigMismatchError, StreetlexError, UsageError
from .evaluation import (
    ExperimentRunner,
    load_gold,
    micro_prf,
    sweep_contexts_per_seed,
    sweep_contexts_per_term,
    sweep_seeds,
    sweep_theta_c,
    write_metrics_csv,
    write_sweep_csv,
)
from .index import Index, build_index
from .linker import annotate_posts, build_links, summary_report, write_links_tsv
from .synthetic import SyntheticSpec, generate_synthetic, write_dataset
from .terminology import (
    TerminologyConfig,
    extract_candidates,
    read_candidates_tsv,
    write_candidates_tsv,
)
from .text import NORMALIZER_VERSION
from .voting import UNASSIGNED, VoteConfig, classify_all, read_lexicon_tsv, write_lexicon_tsv


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors with exit code 1, not 2."""

    def error(self, message):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="streetlex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--workspace", default="workspace", help="artifact directory")
        p.add_argument("--config", default=None, help="JSON config file; flags override it")
        p.add_argument("--rng-seed", type=int, default=None)

    p = sub.add_parser("ingest", help="normalize raw corpora into the workspace")
    common(p)
    p.add_argument("--domain-corpus", required=True)
    p.add_argument("--background-corpus", default=None)
    p.add_argument("--format", choices=("jsonl", "textdir"), default=None)

    p = sub.add_parser("index", help="build the positional inverted index")
    common(p)

    p = sub.add_parser("terms", help="extract contrastive candidate terminology")
    common(p)
    p.add_argument("--min-df", type=int, default=None)
    p.add_argument("--max-candidates", type=int, default=None)

    p = sub.add_parser("train", help="train the context classifier from seeds")
    common(p)
    p.add_argument("--seeds-substance", required=True)
    p.add_argument("--seeds-effect", required=True)
    p.add_argument("--seeds-per-class", type=int, default=None)
    p.add_argument("--contexts-per-seed", type=int, default=None)
    p.add_argument("--window-chars", type=int, default=None)
    p.add_argument("--mask-token", default=None)
    p.add_argument("--svm-c", type=float, default=None)

    p = sub.add_parser("classify", help="vote every candidate into the lexicon")
    common(p)
    p.add_argument("--theta-p", type=float, default=None)
    p.add_argument("--theta-c", type=float, default=None)
    p.add_argument("--contexts-per-term", type=int, default=None)
    p.add_argument("--terms-file", default=None, help="classify these terms instead of all candidates")

    p = sub.add_parser("link", help="derive substance-effect links from the lexicon")
    common(p)
    p.add_argument("--min-support", type=int, default=None)
    p.add_argument("--top-substances", type=int, default=10)

    p = sub.add_parser("eval", help="score the lexicon against gold lists")
    common(p)
    p.add_argument("--gold-substances", required=True)
    p.add_argument("--gold-effects", required=True)
    p.add_argument("--gold-rest", default=None)

    p = sub.add_parser("sweep", help="sweep one pipeline parameter and report metrics")
    common(p)
    p.add_argument(
        "--param",
        required=True,
        choices=("seeds", "theta-c", "contexts-per-seed", "contexts-per-term"),
    )
    p.add_argument("--values", default=None, help="comma-separated sweep values")
    p.add_argument("--seeds-substance", required=True)
    p.add_argument("--seeds-effect", required=True)
    p.add_argument("--gold-substances", required=True)
    p.add_argument("--gold-effects", required=True)
    p.add_argument("--gold-rest", default=None)
    p.add_argument("--include-rest", action="store_true")
    p.add_argument("--seeds-per-class", type=int, default=None)
    p.add_argument("--contexts-per-seed", type=int, default=None)
    p.add_argument("--contexts-per-term", type=int, default=None)
    p.add_argument("--theta-p", type=float, default=None)
    p.add_argument("--theta-c", type=float, default=None)
    p.add_argument("--window-chars", type=int, default=None)
    p.add_argument("--mask-token", default=None)

    p = sub.add_parser("synth", help="generate a synthetic corpus with known ground truth")
    common(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n-posts", type=int, default=10000)
    p.add_argument("--n-substances", type=int, default=100)
    p.add_argument("--n-effects", type=int, default=40)
    p.add_argument("--n-rest", type=int, default=100)
    p.add_argument("--noise-rate", type=float, default=0.1)

    return parser


def _effective_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    overrides = {
        key: getattr(args, key)
        for key in (
            "format",
            "window_chars",
            "mask_token",
            "contexts_per_seed",
            "contexts_per_term",
            "seeds_per_class",
            "theta_p",
            "theta_c",
            "min_support",
            "min_df",
            "max_candidates",
            "svm_c",
            "rng_seed",
        )
        if hasattr(args, key)
    }
    return cfg.apply_overrides(overrides)


def _ws(args) -> Path:
    ws = Path(args.workspace)
    ws.mkdir(parents=True, exist_ok=True)
    return ws


def _validated(factory, **kwargs):
    """Flag values can violate a config invariant; that is the user's
    mistake, not an internal failure."""
    try:
        return factory(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise UsageError(f"missing {path}; {hint}")
    return path


def _load_workspace_corpus(ws: Path, which: str = "corpus.jsonl"):
    path = _require(ws / which, "run `streetlex ingest` first")
    return ingest(path, "jsonl").corpus, path


def cmd_ingest(args, cfg: PipelineConfig) -> int:
    ws = _ws(args)
    meta = {"artifact": "corpus", "config_hash": config_fingerprint(cfg.ingest_fields())}
    result = ingest(args.domain_corpus, cfg.format)
    save_corpus(result.corpus, ws / "corpus.jsonl", meta={**meta, "skipped": result.skipped})
    print(f"domain: {result.corpus.doc_count} posts, {result.skipped} skipped")
    if args.background_corpus:
        bg = ingest(args.background_corpus, cfg.format)
        save_corpus(bg.corpus, ws / "background.jsonl", meta={**meta, "skipped": bg.skipped})
        print(f"background: {bg.corpus.doc_count} posts, {bg.skipped} skipped")
    return 0


def cmd_index(args, cfg: PipelineConfig) -> int:
    ws = _ws(args)
    corpus, corpus_path = _load_workspace_corpus(ws)
    index = build_index(corpus)
    index.save(
        ws / "index.json",
        meta={
            "config_hash": config_fingerprint({"normalizer": NORMALIZER_VERSION}),
            "inputs": {"corpus": file_fingerprint(corpus_path)},
        },
    )
    print(f"indexed {index.doc_count} posts, {len(index.df)} distinct tokens")
    return 0


def cmd_terms(args, cfg: PipelineConfig) -> int:
    ws = _ws(args)
    domain, domain_path = _load_workspace_corpus(ws)
    background, background_path = _load_workspace_corpus(ws, "background.jsonl")
    term_cfg = TerminologyConfig(
        min_df=cfg.min_df, max_candidates=cfg.max_candidates, smoothing=cfg.smoothing
    )
    candidates = extract_candidates(domain, background, term_cfg)
    write_candidates_tsv(
        candidates,
        ws / "candidates.tsv",
        header_lines=artifact_header(
            cfg.terms_fields(),
            {
                "domain": file_fingerprint(domain_path),
                "background": file_fingerprint(background_path),
            },
            cfg,
        ),
    )
    print(f"{len(candidates)} candidate terms -> {ws / 'candidates.tsv'}")
    return 0


def _verify_index_chain(ws: Path, index: Index) -> None:
    corpus_path = _require(ws / "corpus.jsonl", "run `streetlex ingest` first")
    recorded = (index.meta or {}).get("inputs", {}).get("corpus")
    actual = file_fingerprint(corpus_path)
    if recorded != actual:
        raise ConfigMismatchError(
            f"index was built from corpus {recorded}, workspace holds {actual}; re-run `streetlex index`"
        )


def cmd_train(args, cfg: PipelineConfig) -> int:
    ws = _ws(args)
    corpus, _ = _load_workspace_corpus(ws)
    index_path = _require(ws / "index.json", "run `streetlex index` first")
    index = Index.load(index_path)
    _verify_index_chain(ws, index)

    substance_seeds, effect_seeds = load_seed_lists(args.seeds_substance, args.seeds_effect)
    ctx_cfg = _validated(
        ContextConfig,
        window_chars=cfg.window_chars,
        mask_token=cfg.mask_token,
        max_posts_per_term=cfg.contexts_per_seed,
    )
    subs: list[str] = []
    effs: list[str] = []
    for _ in range(cfg.seeds_per_class):
        subs.append(select_next_seed(substance_seeds, subs, index))
        effs.append(select_next_seed(effect_seeds, effs, index))
    training = build_training_set(index, corpus, subs, effs, ctx_cfg)
    model = train(
        training.t_substance,
        training.t_effect,
        TrainingConfig(
            svm_c=cfg.svm_c, calibration_folds=cfg.calibration_folds, rng_seed=cfg.rng_seed
        ),
        mask_token=cfg.mask_token,
        metadata={
            "seeds": training.seeds_used,
            "config_hash": config_fingerprint(cfg.train_fields()),
            "context_hash": config_fingerprint(cfg.context_fields()),
            "inputs": {
                "index": file_fingerprint(index_path),
                "seeds_substance": file_fingerprint(args.seeds_substance),
                "seeds_effect": file_fingerprint(args.seeds_effect),
            },
        },
    )
    model.save(ws / "model.json")
    print(
        f"trained on {len(training.t_substance)}+{len(training.t_effect)} snippets "
        f"from seeds {subs} / {effs}"
    )
    return 0


def cmd_classify(args, cfg: PipelineConfig) -> int:
    ws = _ws(args)
    model_path = ws / "model.json"
    if not model_path.exists():
        raise UsageError(f"missing {model_path}; run `streetlex train` before `streetlex classify`")
    model = ContextModel.load(model_path)
    corpus, _ = _load_workspace_corpus(ws)
    index_path = _require(ws / "index.json", "run `streetlex index` first")
    index = Index.load(index_path)
    _verify_index_chain(ws, index)
    require_matching_hash(
        model_path,
        model.metadata.get("context_hash"),
        cfg.context_fields(),
        "context window",
    )
    recorded_index = model.metadata.get("inputs", {}).get("index")
    if recorded_index != file_fingerprint(index_path):
        raise ConfigMismatchError(
            "model was trained against a different index; re-run `streetlex train`"
        )

    if args.terms_file:
        terms = [
            line.split("#", 1)[0].strip()
            for line in Path(args.terms_file).read_text(encoding="utf-8").splitlines()
        ]
        terms = [t for t in terms if t]
        inputs = {"model": file_fingerprint(model_path), "terms": file_fingerprint(args.terms_file)}
    else:
        candidates_path = _require(ws / "candidates.tsv", "run `streetlex terms` first")
        terms = [c.surface for c in read_candidates_tsv(candidates_path)]
        inputs = {
            "model": file_fingerprint(model_path),
            "candidates": file_fingerprint(candidates_path),
        }

    ctx_cfg = _validated(ContextConfig, window_chars=cfg.window_chars, mask_token=cfg.mask_token)
    vote_cfg = _validated(
        VoteConfig,
        theta_p=cfg.theta_p, theta_c=cfg.theta_c, contexts_per_term=cfg.contexts_per_term
    )
    decisions = classify_all(terms, model, index, corpus, ctx_cfg, vote_cfg)
    write_lexicon_tsv(
        decisions,
        ws / "lexicon.tsv",
        header_lines=artifact_header(cfg.classify_fields(), inputs, cfg),
    )
    assigned = sum(1 for d in decisions if d.label != UNASSIGNED)
    print(f"{assigned} of {len(decisions)} terms assigned -> {ws / 'lexicon.tsv'}")
    return 0


def cmd_link(args, cfg: PipelineConfig) -> int:
    ws = _ws(args)
    corpus, corpus_path = _load_workspace_corpus(ws)
    lexicon_path = _require(ws / "lexicon.tsv", "run `streetlex classify` first")
    decisions = read_lexicon_tsv(lexicon_path)
    lexicon = {
        d.term: d.label for d in decisions if d.label in (LABEL_SUBSTANCE, LABEL_EFFECT)
    }
    metadata = annotate_posts(corpus, lexicon)
    table = build_links(metadata, cfg.min_support)
    write_links_tsv(
        table,
        ws / "links.tsv",
        header_lines=artifact_header(
            cfg.link_fields(),
            {"lexicon": file_fingerprint(lexicon_path), "corpus": file_fingerprint(corpus_path)},
            cfg,
        ),
    )
    summary = summary_report(table, metadata, top_substances=args.top_substances)
    (ws / "links_summary.txt").write_text(summary + "\n", encoding="utf-8")
    print(f"{len(table)} links (min_support={cfg.min_support}) -> {ws / 'links.tsv'}")
    print(summary)
    return 0


def cmd_eval(args, cfg: PipelineConfig) -> int:
    ws = _ws(args)
    lexicon_path = _require(ws / "lexicon.tsv", "run `streetlex classify` first")
    decisions = read_lexicon_tsv(lexicon_path)
    gold = load_gold(args.gold_substances, args.gold_effects, args.gold_rest)
    report = micro_prf(decisions, gold, config=cfg.classify_fields())
    write_metrics_csv(
        report,
        ws / "metrics.csv",
        header_lines=artifact_header(
            cfg.classify_fields(), {"lexicon": file_fingerprint(lexicon_path)}, cfg
        ),
    )
    print(
        f"P={report.precision:.3f} R={report.recall:.3f} F1={report.f1:.3f} "
        f"over {report.n_scored} gold terms"
    )
    return 0


def _parse_values(raw: str | None, as_int: bool) -> list | None:
    if raw is None:
        return None
    out = []
    for piece in raw.split(","):
        piece = piece.strip()
        if not piece:
            continue
        out.append(int(piece) if as_int else float(piece))
    if not out:
        raise UsageError("--values is empty")
    return out


def cmd_sweep(args, cfg: PipelineConfig) -> int:
    ws = _ws(args)
    corpus, _ = _load_workspace_corpus(ws)
    index_path = _require(ws / "index.json", "run `streetlex index` first")
    index = Index.load(index_path)
    _verify_index_chain(ws, index)
    candidates_path = _require(ws / "candidates.tsv", "run `streetlex terms` first")
    candidates = [c.surface for c in read_candidates_tsv(candidates_path)]
    gold = load_gold(args.gold_substances, args.gold_effects, args.gold_rest)
    substance_seeds, effect_seeds = load_seed_lists(args.seeds_substance, args.seeds_effect)

    runner = ExperimentRunner(
        corpus=corpus,
        index=index,
        gold=gold,
        substance_seeds=substance_seeds,
        effect_seeds=effect_seeds,
        candidate_surfaces=candidates,
        ctx_cfg=_validated(ContextConfig, window_chars=cfg.window_chars, mask_token=cfg.mask_token),
        train_cfg=TrainingConfig(
            svm_c=cfg.svm_c, calibration_folds=cfg.calibration_folds, rng_seed=cfg.rng_seed
        ),
    )
    vote_cfg = _validated(
        VoteConfig,
        theta_p=cfg.theta_p, theta_c=cfg.theta_c, contexts_per_term=cfg.contexts_per_term
    )
    k = cfg.seeds_per_class
    include_rest = bool(args.include_rest)

    if args.param == "seeds":
        values = _parse_values(args.values, as_int=True) or list(range(1, k + 1))
        points = sweep_seeds(
            runner,
            max(values),
            vote_cfg,
            contexts_per_seed=cfg.contexts_per_seed,
            include_rest=include_rest,
        )
        points = [p for p in points if p.value in values]
    elif args.param == "theta-c":
        values = _parse_values(args.values, as_int=False) or [0.6, 0.75, 0.8]
        points = sweep_theta_c(
            runner, values, k, vote_cfg,
            contexts_per_seed=cfg.contexts_per_seed, include_rest=include_rest,
        )
    elif args.param == "contexts-per-seed":
        values = _parse_values(args.values, as_int=True) or [100, 1000, 3000]
        points = sweep_contexts_per_seed(runner, values, k, vote_cfg, include_rest=include_rest)
    else:
        values = _parse_values(args.values, as_int=True) or [10, 50, 100, 300]
        points = sweep_contexts_per_term(
            runner, values, k, vote_cfg,
            contexts_per_seed=cfg.contexts_per_seed, include_rest=include_rest,
        )

    out_path = ws / f"sweep_{args.param.replace('-', '_')}.csv"
    write_sweep_csv(
        points,
        out_path,
        header_lines=artifact_header(
            {**cfg.train_fields(), **cfg.classify_fields(), "param": args.param},
            {"candidates": file_fingerprint(candidates_path)},
            cfg,
        ),
    )
    for point in points:
        print(
            f"{point.sweep_param}={point.value}: R={point.report.recall:.3f} "
            f"P={point.report.precision:.3f} F1={point.report.f1:.3f}"
        )
    print(f"-> {out_path}")
    return 0


def cmd_synth(args, cfg: PipelineConfig) -> int:
    spec = _validated(
        SyntheticSpec,
        n_posts=args.n_posts,
        n_substances=args.n_substances,
        n_effects=args.n_effects,
        n_rest=args.n_rest,
        noise_rate=args.noise_rate,
        rng_seed=cfg.rng_seed if cfg.rng_seed else 42,
    )
    dataset = generate_synthetic(spec)
    write_dataset(dataset, args.out_dir)
    print(
        f"wrote {dataset.domain.doc_count} domain / {dataset.background.doc_count} "
        f"background posts to {args.out_dir}"
    )
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "index": cmd_index,
    "terms": cmd_terms,
    "train": cmd_train,
    "classify": cmd_classify,
    "link": cmd_link,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _effective_config(args)
        return _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except StreetlexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
