"""Adversary evaluations against recorded campaigns and public artifacts.

Every scenario consumes only what a real adversary could hold: the
eavesdropper's own CSI traces, public-channel artifacts, and configuration.
Ground-truth antenna labels enter solely for scoring cluster assignments.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import gammaln, logsumexp
from sklearn.cluster import KMeans

from .channel import SpatialChannel, ChannelSet
from .errors import ParameterError
from .metrics import NdDistribution, cross_correlation, nd_distribution
from .probing import run_probing_campaign
from .validation import check_positive_int

NLOS_TAP_ATTENUATION_DB = 10.0


@dataclass
class PredictableChannelResult:
    scores: dict  # mode -> |corr(amplitude, door state)|
    traces: dict  # mode -> responder CSI matrix
    door_states: np.ndarray
    subcarrier: int
    degenerate: bool = False


@dataclass
class ReplayResult:
    rho_be: np.ndarray
    offset: int

    @property
    def median(self):
        return float(np.median(self.rho_be))


@dataclass
class BruteForceResult:
    distribution: NdDistribution
    d95: int
    search_space_log2: float


@dataclass
class SpeculationResult:
    overall_accuracy: float
    per_antenna_accuracy: np.ndarray
    confusion: np.ndarray  # rows: true antenna, cols: matched cluster label
    degenerate: bool = False


def _door_schedule(n_rounds, period):
    """Square wave: open for the first half of each period, then closed."""
    rounds = np.arange(1, n_rounds + 1)
    return ((rounds - 1) % period) >= (period / 2.0)


def _attenuate_dominant_tap(channels, closed, dominant):
    if not closed:
        return channels
    scale = 10.0 ** (-NLOS_TAP_ATTENUATION_DB / 20.0)
    taps = channels.ab.taps.copy()
    taps[:, dominant] *= scale
    ab = SpatialChannel(taps, channels.ab.n_subcarriers, channels.ab.power_profile)
    return ChannelSet(ab=ab, ae=channels.ae, be=channels.be)


def predictable_channel_scenario(config, door_period=40, modes=("none", "random")):
    """Door-modulated channel: the reciprocal link alternates between LoS and
    NLoS (strongest realized tap attenuated 10 dB) on the door schedule.

    The attack score per mode is the absolute Pearson correlation between the
    responder's mid-band amplitude sequence and the binary door state.
    """
    if door_period < 2:
        raise ParameterError("door period must be at least 2 rounds")
    states = _door_schedule(config.n_rounds, door_period)
    if states.all() or not states.any():
        return PredictableChannelResult(
            scores={mode: 0.0 for mode in modes},
            traces={},
            door_states=states,
            subcarrier=config.n_subcarriers // 2,
            degenerate=True,
        )
    subcarrier = config.n_subcarriers // 2
    scores, traces = {}, {}
    for mode in modes:
        mode_config = replace(config, mode=mode)
        dominant = {"index": None}

        def hook(round_no, channels):
            if dominant["index"] is None:
                dominant["index"] = int(np.argmax(np.abs(channels.ab.taps[0]) ** 2))
            return _attenuate_dominant_tap(
                channels, bool(states[round_no - 1]), dominant["index"]
            )

        campaign = run_probing_campaign(config.n_rounds, mode_config, config.seed, channel_hook=hook)
        amplitude = np.abs(campaign.h_bob[subcarrier, :])
        if amplitude.std() == 0.0:
            scores[mode] = 0.0
        else:
            scores[mode] = float(abs(np.corrcoef(amplitude, states.astype(float))[0, 1]))
        traces[mode] = campaign.h_bob
    return PredictableChannelResult(
        scores=scores, traces=traces, door_states=states, subcarrier=subcarrier
    )


def replay_scenario(config, offset=1):
    """Position replay: the eavesdropper occupies the responder's position
    ``offset`` rounds later, so her downlink channel is the reciprocal link
    at the later time.  Returns the per-round amplitude correlation between
    the responder's round-k CSI and the replayed round-(k+offset) CSI."""
    offset = check_positive_int(offset, "offset")
    if config.n_rounds <= offset:
        raise ParameterError("campaign too short for the replay offset")
    campaign = run_probing_campaign(config.n_rounds, config, config.seed, eve_at_bob=True)
    rho = cross_correlation(
        campaign.h_bob[:, : config.n_rounds - offset],
        campaign.h_eve_down[:, offset:],
    )
    return ReplayResult(rho_be=rho, offset=offset)


def effective_bruteforce_gain(bits, group_size=128):
    """Per-group key-update search cost for an attacker who knows the
    previous group: log2 of the ball of radius d95 (the empirical 95th
    percentile of adjacent-group distances)."""
    dist = nd_distribution(bits, group_size)
    d95 = int(np.percentile(dist.distances, 95, method="inverted_cdf"))
    d = np.arange(d95 + 1)
    log_binom = gammaln(group_size + 1) - gammaln(d + 1) - gammaln(group_size - d + 1)
    log2_ball = logsumexp(log_binom) / math.log(2.0)
    return BruteForceResult(distribution=dist, d95=d95, search_space_log2=float(log2_ball))


def speculate_antenna_order(
    eve_csi,
    n_antennas,
    truth,
    feature="complex",
    restarts=50,
    seed=0,
):
    """Cluster the eavesdropper's per-round CSI vectors into antenna groups.

    K-means (k-means++ seeding, ``restarts`` inits, best inertia) runs on
    per-round feature vectors; cluster labels are matched to true antenna
    indices by the assignment maximizing total agreement, which gives the
    attacker maximal benefit of the doubt.  ``feature="complex"`` stacks real
    and imaginary parts (the default; strongest against plain antenna
    scheduling), ``"amplitude"`` uses magnitude profiles.

    ``truth`` (1-based antenna indices) is used only to score the clustering.
    """
    n_antennas = check_positive_int(n_antennas, "n_antennas")
    eve_csi = np.asarray(eve_csi, dtype=complex)
    truth = np.asarray(truth, dtype=int)
    n_rounds = eve_csi.shape[1]
    if truth.shape != (n_rounds,):
        raise ParameterError("truth labels must match the number of rounds")
    if n_rounds < n_antennas:
        raise ParameterError("need at least as many rounds as antennas")
    if n_antennas == 1:
        confusion = np.array([[n_rounds]])
        return SpeculationResult(1.0, np.ones(1), confusion)

    if feature == "complex":
        features = np.hstack([eve_csi.T.real, eve_csi.T.imag])
    elif feature == "amplitude":
        features = np.abs(eve_csi.T)
    else:
        raise ParameterError(f"unknown feature {feature!r}")

    if np.allclose(features.std(axis=0), 0.0):
        per_antenna = np.full(n_antennas, 1.0 / n_antennas)
        confusion = np.zeros((n_antennas, n_antennas), dtype=int)
        confusion[:, 0] = np.bincount(truth - 1, minlength=n_antennas)
        return SpeculationResult(1.0 / n_antennas, per_antenna, confusion, degenerate=True)

    km = KMeans(
        n_clusters=n_antennas,
        init="k-means++",
        n_init=restarts,
        random_state=int(seed) % (2**32),
    ).fit(features)
    labels = km.labels_

    # Optimal bipartite matching of cluster labels to antennas.
    counts = np.zeros((n_antennas, n_antennas), dtype=int)
    for label, antenna in zip(labels, truth):
        counts[label, antenna - 1] += 1
    rows, cols = linear_sum_assignment(-counts)
    label_to_antenna = dict(zip(rows, cols))

    confusion = np.zeros((n_antennas, n_antennas), dtype=int)
    for label, antenna in zip(labels, truth):
        confusion[antenna - 1, label_to_antenna[label]] += 1
    correct = np.diag(confusion).astype(float)
    totals = confusion.sum(axis=1).astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        per_antenna = np.where(totals > 0, correct / totals, 0.0)
    overall = float(correct.sum() / n_rounds)
    return SpeculationResult(overall, per_antenna, confusion)
