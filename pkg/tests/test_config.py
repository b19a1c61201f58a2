import json

import pytest

from streetlex.config import (
    PipelineConfig,
    artifact_header,
    config_fingerprint,
    file_fingerprint,
    read_artifact_header,
    require_matching_hash,
)
from streetlex.errors import ConfigMismatchError, UsageError


def test_config_fingerprint_is_order_insensitive_and_value_sensitive():
    a = config_fingerprint({"x": 1, "y": 2})
    b = config_fingerprint({"y": 2, "x": 1})
    c = config_fingerprint({"x": 1, "y": 3})
    assert a == b
    assert a != c
    assert len(a) == 12 and all(ch in "0123456789abcdef" for ch in a)


def test_stage_fields_are_scoped():
    cfg = PipelineConfig()
    before = config_fingerprint(cfg.context_fields())
    cfg.min_support = 9
    cfg.theta_c = 0.9
    assert config_fingerprint(cfg.context_fields()) == before
    assert cfg.link_fields() == {"min_support": 9}
    cfg.window_chars = 60
    assert config_fingerprint(cfg.context_fields()) != before
    # the training hash covers the window too, since it shapes the snippets
    assert "window_chars" in cfg.train_fields()
    assert "theta_p" not in cfg.train_fields()


def test_file_fingerprint(tmp_path):
    target = tmp_path / "blob.bin"
    target.write_bytes(b"abc" * 1000)
    first = file_fingerprint(target)
    assert first == file_fingerprint(target)
    target.write_bytes(b"abd" * 1000)
    assert file_fingerprint(target) != first
    with pytest.raises(UsageError):
        file_fingerprint(tmp_path / "missing.bin")


def test_from_file_keeps_unknown_keys_as_extras(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"theta_p": 0.75, "color": "teal"}), encoding="utf-8")
    cfg = PipelineConfig.from_file(path)
    assert cfg.theta_p == 0.75
    assert cfg.theta_c == 0.6
    assert cfg.extras == {"color": "teal"}


def test_from_file_rejects_bad_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(UsageError, match="JSON object"):
        PipelineConfig.from_file(path)
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(UsageError):
        PipelineConfig.from_file(path)
    with pytest.raises(UsageError):
        PipelineConfig.from_file(tmp_path / "absent.json")


def test_overrides_skip_none_values():
    cfg = PipelineConfig()
    cfg.apply_overrides({"theta_p": None, "min_support": 7, "unknown_flag": 3})
    assert cfg.theta_p == 0.8
    assert cfg.min_support == 7
    assert not hasattr(cfg, "unknown_flag")


def test_artifact_header_round_trip(tmp_path):
    cfg = PipelineConfig()
    lines = artifact_header(cfg.link_fields(), {"lexicon": "fffff0000001"}, cfg)
    path = tmp_path / "links.tsv"
    path.write_text(
        "".join(f"# {line}\n" for line in lines) + "substance\teffect\tcount\n",
        encoding="utf-8",
    )
    header = read_artifact_header(path)
    assert header["config_hash"] == config_fingerprint(cfg.link_fields())
    assert header["inputs"] == {"lexicon": "fffff0000001"}
    assert header["config"]["min_support"] == 3
    require_matching_hash(path, header["config_hash"], cfg.link_fields(), "link")


def test_require_matching_hash_failures(tmp_path):
    cfg = PipelineConfig()
    with pytest.raises(ConfigMismatchError, match="no config hash"):
        require_matching_hash("links.tsv", None, cfg.link_fields(), "link")
    with pytest.raises(ConfigMismatchError, match="mismatch"):
        require_matching_hash("links.tsv", "000000000000", cfg.link_fields(), "link")
