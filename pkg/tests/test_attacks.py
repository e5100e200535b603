import numpy as np
import pytest

from obskey.attacks import (
    effective_bruteforce_gain,
    predictable_channel_scenario,
    replay_scenario,
    speculate_antenna_order,
)
from obskey.config import ExperimentConfig
from obskey.errors import ParameterError
from obskey.probing import run_probing_campaign


def test_bruteforce_iid_bits_no_gain(rng):
    bits = rng.integers(0, 2, 128 * 600).astype(np.uint8)
    result = effective_bruteforce_gain(bits, 128)
    assert 69 <= result.d95 <= 78  # binomial 95th percentile near 73
    assert result.search_space_log2 >= 126.0


def test_bruteforce_repetitive_bits_large_gain():
    # Adjacent groups differing in ~18 positions: search space near 2^70.
    rng = np.random.default_rng(0)
    groups = [rng.integers(0, 2, 128).astype(np.uint8)]
    for _ in range(599):
        nxt = groups[-1].copy()
        flip = rng.choice(128, size=18, replace=False)
        nxt[flip] ^= 1
        groups.append(nxt)
    result = effective_bruteforce_gain(np.concatenate(groups), 128)
    assert 60 <= result.search_space_log2 <= 85
    assert result.search_space_log2 < 128


def test_bruteforce_identical_groups_zero_cost():
    bits = np.tile(np.ones(128, dtype=np.uint8), 10)
    result = effective_bruteforce_gain(bits, 128)
    assert result.d95 == 0
    assert result.search_space_log2 == pytest.approx(0.0)


def test_bruteforce_monotone_in_distance(rng):
    def stream(flips):
        groups = [rng.integers(0, 2, 128).astype(np.uint8)]
        for _ in range(400):
            nxt = groups[-1].copy()
            nxt[rng.choice(128, size=flips, replace=False)] ^= 1
            groups.append(nxt)
        return np.concatenate(groups)

    small = effective_bruteforce_gain(stream(5), 128).search_space_log2
    large = effective_bruteforce_gain(stream(30), 128).search_space_log2
    assert small < large


def test_speculation_single_antenna_trivial():
    csi = np.ones((8, 16), dtype=complex)
    result = speculate_antenna_order(csi, 1, np.ones(16, dtype=int))
    assert result.overall_accuracy == 1.0


def test_speculation_degenerate_inputs():
    csi = np.ones((8, 40), dtype=complex)
    truth = np.tile(np.arange(1, 5), 10)
    result = speculate_antenna_order(csi, 4, truth)
    assert result.degenerate
    assert result.overall_accuracy == pytest.approx(0.25)
    assert result.confusion.sum(axis=1).tolist() == [10, 10, 10, 10]


def test_speculation_label_permutation_invariance():
    cfg = ExperimentConfig(n_subcarriers=64, n_rounds=120, mode="antenna_only", seed=3)
    campaign = run_probing_campaign(cfg.n_rounds, cfg, cfg.seed)
    base = speculate_antenna_order(
        campaign.h_eve_down, 8, campaign.antenna_truth, seed=0
    )
    perm = np.array([3, 5, 1, 8, 2, 7, 4, 6])
    relabeled = perm[campaign.antenna_truth - 1]
    permuted = speculate_antenna_order(campaign.h_eve_down, 8, relabeled, seed=0)
    assert base.overall_accuracy == pytest.approx(permuted.overall_accuracy)


def test_speculation_separates_plain_antenna_scheduling():
    cfg = ExperimentConfig(n_subcarriers=128, n_rounds=300, mode="antenna_only", snr_db=20.0, seed=0)
    campaign = run_probing_campaign(cfg.n_rounds, cfg, cfg.seed)
    result = speculate_antenna_order(
        campaign.h_eve_down, cfg.n_antennas, campaign.antenna_truth, seed=cfg.seed
    )
    assert result.overall_accuracy >= 0.8
    assert result.confusion.sum() == cfg.n_rounds


def test_speculation_defeated_by_obfuscation():
    cfg = ExperimentConfig(n_subcarriers=128, n_rounds=300, mode="random", snr_db=20.0, seed=0)
    campaign = run_probing_campaign(cfg.n_rounds, cfg, cfg.seed)
    result = speculate_antenna_order(
        campaign.h_eve_down, cfg.n_antennas, campaign.antenna_truth, seed=cfg.seed
    )
    assert result.overall_accuracy <= 2.0 / cfg.n_antennas


def test_speculation_requires_enough_rounds():
    with pytest.raises(ParameterError):
        speculate_antenna_order(np.ones((4, 3), complex), 8, np.ones(3, int))


def test_replay_modes_split():
    base = ExperimentConfig(
        n_subcarriers=128, n_rounds=150, rho_t=0.999, snr_db=20.0, seed=2
    )
    slow = replay_scenario(base.with_overrides(mode="none"), offset=1)
    assert slow.median >= 0.9
    obfuscated = replay_scenario(base.with_overrides(mode="random"), offset=1)
    assert obfuscated.median <= 0.5


def test_replay_fast_channel_uncorrelated():
    cfg = ExperimentConfig(
        n_subcarriers=128, n_rounds=150, mode="none", rho_t=0.0, snr_db=20.0, seed=2,
        evolution="gauss_markov",
    )
    result = replay_scenario(cfg, offset=1)
    assert abs(result.median) < 0.25


def test_replay_offset_validation():
    cfg = ExperimentConfig(n_subcarriers=64, n_rounds=10, seed=0)
    with pytest.raises(ParameterError):
        replay_scenario(cfg, offset=0)
    with pytest.raises(ParameterError):
        replay_scenario(cfg, offset=10)


def test_predictable_channel_scores():
    cfg = ExperimentConfig(n_subcarriers=128, n_rounds=200, seed=1)
    result = predictable_channel_scenario(cfg, door_period=40)
    assert result.scores["none"] > 0.8
    assert result.scores["random"] < result.scores["none"]
    assert not result.degenerate
    assert result.door_states.shape == (200,)


def test_predictable_channel_obfuscation_suppresses_leak():
    scores = []
    for seed in range(5):
        cfg = ExperimentConfig(n_subcarriers=128, n_rounds=200, seed=seed)
        scores.append(predictable_channel_scenario(cfg, door_period=40).scores["random"])
    assert np.median(scores) < 0.3


def test_predictable_channel_degenerate_constant_door():
    cfg = ExperimentConfig(n_subcarriers=64, n_rounds=10, seed=1)
    result = predictable_channel_scenario(cfg, door_period=40)  # never closes in 10 rounds
    assert result.degenerate
    assert all(v == 0.0 for v in result.scores.values())


def test_predictable_channel_rejects_tiny_period():
    cfg = ExperimentConfig(n_subcarriers=64, n_rounds=10, seed=1)
    with pytest.raises(ParameterError):
        predictable_channel_scenario(cfg, door_period=1)
