"""Pipeline configuration, config hashing, and artifact lineage checks.

Every artifact embeds a short hash of the configuration fields that could
change its content, plus fingerprints of the input files it was derived
from. A later stage recomputes both and refuses to run on inputs whose
recorded lineage disagrees with the effective configuration, instead of
silently producing a mixed-config result."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigMismatchError, UsageError


def config_fingerprint(values: dict) -> str:
    canonical = json.dumps(values, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def file_fingerprint(path: str | Path) -> str:
    digest = hashlib.sha256()
    try:
        with Path(path).open("rb") as handle:
            for chunk in iter(lambda: handle.read(1 << 20), b""):
                digest.update(chunk)
    except OSError as exc:
        raise UsageError(f"cannot fingerprint {path}: {exc}") from exc
    return digest.hexdigest()[:12]


@dataclass
class PipelineConfig:
    """Flat bag of every tunable the CLI exposes. Loadable from a JSON file;
    command-line flags override file values field by field."""

    format: str = "jsonl"
    window_chars: int = 50
    mask_token: str = "CTHULHUFHTAGN"
    contexts_per_seed: int = 3000
    contexts_per_term: int = 100
    seeds_per_class: int = 6
    theta_p: float = 0.8
    theta_c: float = 0.6
    min_support: int = 3
    min_df: int = 5
    max_candidates: int = 5000
    smoothing: float = 1e-9
    svm_c: float = 1.0
    calibration_folds: int = 3
    rng_seed: int = 0
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise UsageError(f"config file {path} must hold a JSON object")
        cfg = cls()
        known = {f.name for f in fields(cls)} - {"extras"}
        for key, value in raw.items():
            if key in known:
                setattr(cfg, key, value)
            else:
                cfg.extras[key] = value
        return cfg

    def apply_overrides(self, overrides: dict) -> "PipelineConfig":
        for key, value in overrides.items():
            if value is not None and hasattr(self, key):
                setattr(self, key, value)
        return self

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "extras"}
        return out

    # Stage-relevant field subsets. An artifact's hash covers exactly the
    # fields that can alter its bytes, so tweaking a later stage's knob
    # does not invalidate earlier artifacts.
    def ingest_fields(self) -> dict:
        return {"format": self.format}

    def terms_fields(self) -> dict:
        return {
            "min_df": self.min_df,
            "max_candidates": self.max_candidates,
            "smoothing": self.smoothing,
        }

    def context_fields(self) -> dict:
        return {"window_chars": self.window_chars, "mask_token": self.mask_token}

    def train_fields(self) -> dict:
        return {
            **self.context_fields(),
            "contexts_per_seed": self.contexts_per_seed,
            "seeds_per_class": self.seeds_per_class,
            "svm_c": self.svm_c,
            "calibration_folds": self.calibration_folds,
            "rng_seed": self.rng_seed,
        }

    def classify_fields(self) -> dict:
        return {
            "theta_p": self.theta_p,
            "theta_c": self.theta_c,
            "contexts_per_term": self.contexts_per_term,
        }

    def link_fields(self) -> dict:
        return {"min_support": self.min_support}


def artifact_header(stage_fields: dict, inputs: dict[str, str], config: PipelineConfig) -> list[str]:
    """Comment lines embedded at the top of TSV/CSV artifacts."""
    return [
        f"config_hash={config_fingerprint(stage_fields)}",
        "inputs=" + json.dumps(inputs, sort_keys=True, separators=(",", ":")),
        "config=" + json.dumps(config.as_dict(), sort_keys=True, separators=(",", ":")),
    ]


def read_artifact_header(path: str | Path) -> dict:
    """Parse the comment header written by artifact_header."""
    out: dict = {}
    try:
        with Path(path).open("r", encoding="utf-8") as handle:
            for line in handle:
                if not line.startswith("# "):
                    break
                body = line[2:].strip()
                if "=" not in body:
                    continue
                key, value = body.split("=", 1)
                if key in ("inputs", "config"):
                    try:
                        out[key] = json.loads(value)
                    except json.JSONDecodeError:
                        out[key] = {}
                else:
                    out[key] = value
    except OSError as exc:
        raise UsageError(f"cannot read artifact {path}: {exc}") from exc
    return out


def require_matching_hash(
    artifact: str | Path, recorded: str | None, expected_fields: dict, what: str
) -> None:
    expected = config_fingerprint(expected_fields)
    if recorded is None:
        raise ConfigMismatchError(f"{artifact} carries no config hash; rebuild it")
    if recorded != expected:
        raise ConfigMismatchError(
            f"{what} config hash mismatch for {artifact}: artifact={recorded} "
            f"effective={expected}; rebuild the artifact or align the flags"
        )
