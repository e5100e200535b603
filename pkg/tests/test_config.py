import pytest

from obskey.config import ExperimentConfig, load_config, parse_assignments, save_config
from obskey.errors import ParameterError


def test_defaults_validate():
    cfg = ExperimentConfig()
    assert cfg.n_antennas == 8
    assert cfg.n_subcarriers == 512
    assert cfg.effective_block_len_freq == 512


def test_invalid_mode_rejected():
    with pytest.raises(ParameterError):
        ExperimentConfig(mode="sideways")


def test_invalid_block_divisor_rejected():
    with pytest.raises(ParameterError):
        ExperimentConfig(n_subcarriers=100, block_len_freq=64)


def test_parse_assignments_types():
    out = parse_assignments(["n_rounds=500", "snr_db=25.5", "center=true", "mode=none"])
    assert out == {"n_rounds": 500, "snr_db": 25.5, "center": True, "mode": "none"}


def test_parse_assignments_rejects_unknown_key():
    with pytest.raises(ParameterError):
        parse_assignments(["bogus=1"])


def test_parse_assignments_rejects_malformed():
    with pytest.raises(ParameterError):
        parse_assignments(["n_rounds"])


def test_config_file_roundtrip(tmp_path):
    cfg = ExperimentConfig(n_rounds=321, snr_db=17.5, mode="antenna_only", seed=42)
    path = tmp_path / "run.cfg"
    save_config(cfg, path)
    loaded = load_config(path)
    assert loaded == cfg


def test_overrides_win_over_file(tmp_path):
    path = tmp_path / "run.cfg"
    save_config(ExperimentConfig(n_rounds=100), path)
    cfg = load_config(path, overrides=["n_rounds=7"])
    assert cfg.n_rounds == 7


def test_desk_preset(tmp_path):
    cfg = load_config(preset="desk")
    assert (cfg.n_subcarriers, cfg.n_rounds) == (128, 200)
    with pytest.raises(ParameterError):
        load_config(preset="pocket")
