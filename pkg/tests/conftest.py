import numpy as np
import pytest

from obskey.config import ExperimentConfig
from obskey.probing import run_probing_campaign


@pytest.fixture(scope="session")
def desk_config():
    return ExperimentConfig(n_subcarriers=128, n_rounds=200, seed=1)


@pytest.fixture(scope="session")
def desk_campaign(desk_config):
    return run_probing_campaign(desk_config.n_rounds, desk_config, desk_config.seed)


@pytest.fixture(scope="session")
def noiseless_desk_config():
    return ExperimentConfig(n_subcarriers=128, n_rounds=200, snr_db=float("inf"), seed=3)


@pytest.fixture(scope="session")
def noiseless_campaign(noiseless_desk_config):
    cfg = noiseless_desk_config
    return run_probing_campaign(cfg.n_rounds, cfg, cfg.seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
