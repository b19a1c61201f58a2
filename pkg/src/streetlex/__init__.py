"""Semi-supervised induction of substance and effect lexicons from forum text."""

from .classifier import (
    LABEL_EFFECT,
    LABEL_SUBSTANCE,
    ContextModel,
    SeedList,
    TrainingConfig,
    build_training_set,
    load_seed_list,
    load_seed_lists,
    select_next_seed,
    train,
)
from .config import PipelineConfig
from .context import DEFAULT_MASK, ContextConfig, ContextSnippet, harvest
from .corpus import Corpus, Post, ingest, save_corpus
from .errors import (
    ArtifactVersionError,
    ConfigMismatchError,
    DataFormatError,
    NoUnusedSeedsError,
    SeedsNotInCorpusError,
    StreetlexError,
    UsageError,
)
from .evaluation import ExperimentRunner, GoldSet, MetricsReport, load_gold, micro_prf
from .index import Index, Occurrence, build_index, find_occurrences
from .linker import LinkTable, annotate_posts, build_links
from .synthetic import SyntheticSpec, generate_synthetic, write_dataset
from .terminology import CandidateTerm, TerminologyConfig, extract_candidates
from .voting import UNASSIGNED, TermDecision, VoteConfig, classify_all, classify_term, tally_votes

__version__ = "0.1.0"

__all__ = [
    "ArtifactVersionError",
    "CandidateTerm",
    "ConfigMismatchError",
    "ContextConfig",
    "ContextModel",
    "ContextSnippet",
    "Corpus",
    "DEFAULT_MASK",
    "DataFormatError",
    "ExperimentRunner",
    "GoldSet",
    "Index",
    "LABEL_EFFECT",
    "LABEL_SUBSTANCE",
    "LinkTable",
    "MetricsReport",
    "NoUnusedSeedsError",
    "Occurrence",
    "PipelineConfig",
    "Post",
    "SeedList",
    "SeedsNotInCorpusError",
    "StreetlexError",
    "SyntheticSpec",
    "TermDecision",
    "TerminologyConfig",
    "TrainingConfig",
    "UNASSIGNED",
    "UsageError",
    "VoteConfig",
    "annotate_posts",
    "build_index",
    "build_links",
    "build_training_set",
    "classify_all",
    "classify_term",
    "extract_candidates",
    "find_occurrences",
    "generate_synthetic",
    "harvest",
    "ingest",
    "load_gold",
    "load_seed_list",
    "load_seed_lists",
    "micro_prf",
    "save_corpus",
    "select_next_seed",
    "tally_votes",
    "train",
    "write_dataset",
]
