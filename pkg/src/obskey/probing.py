"""Channel obfuscation and the bidirectional probing protocol.

Each round, the initiating party draws a fresh complex-Gaussian FIR filter
and a uniform antenna index; the pilot is pre-multiplied by the filter's
frequency response before transmission, and the returning plain pilot is
post-multiplied by the same response after reception.  Both parties therefore
estimate the same filtered channel, while the filter and antenna index stay
private to the initiator.

Four scheduling/filtering modes are supported:

* ``random``        - random antenna + random filter (the full scheme)
* ``round_robin``   - deterministic antenna cycling, no filtering
* ``antenna_only``  - random antenna, no filtering
* ``none``          - fixed antenna 1, no filtering

plus ``filtered_round_robin`` (deterministic antennas, random filter), which
isolates the coefficient-only weakness in security experiments.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import (
    ChannelSet,
    EvolutionParams,
    SmoothFader,
    estimate_csi,
    evolve,
    generate_channel_set,
    observe,
    round_robin_index,
)
from .errors import ParameterError
from .validation import as_rng, check_pilot, check_positive_int

CAMPAIGN_MODES = ("random", "round_robin", "antenna_only", "none", "filtered_round_robin")

_RANDOM_ANTENNA = {"random", "antenna_only"}
_FILTERED = {"random", "filtered_round_robin"}


@dataclass
class FilterTaps:
    """Secret FIR taps, i.i.d. complex Gaussian with unit variance."""

    a: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        if self.a.ndim != 1 or self.a.size < 1:
            raise ParameterError("filter taps must be a non-empty vector")

    def __len__(self):
        return self.a.size


@dataclass
class ObfuscationState:
    """Per-round secret of the initiator.  Never written to public outputs."""

    round_no: int
    antenna: int
    taps: FilterTaps
    alpha: np.ndarray


@dataclass
class RoundResult:
    h_a: np.ndarray
    h_b: np.ndarray
    h_e_down: np.ndarray
    h_e_up: np.ndarray


def draw_filter_taps(filter_len, rng):
    """i.i.d. CN(0, 1) taps: real and imaginary parts each N(0, 1/2)."""
    filter_len = check_positive_int(filter_len, "filter_len")
    rng = as_rng(rng)
    a = (rng.standard_normal(filter_len) + 1j * rng.standard_normal(filter_len)) * np.sqrt(0.5)
    return FilterTaps(a)


def filter_response(taps, n_subcarriers):
    """Frequency response: alpha(n) = sum_{i=1}^{L} a_i exp(-j 2 pi n i / N).

    The delay index starts at 1 (a single tap is a pure one-sample delay), so
    this equals the DFT of the length-N impulse response [0, a_1, ..., a_L]
    with cyclic wrap-around for L >= N.
    """
    n_subcarriers = check_positive_int(n_subcarriers, "n_subcarriers")
    a = taps.a if isinstance(taps, FilterTaps) else np.asarray(taps, dtype=complex)
    impulse = np.zeros(n_subcarriers, dtype=complex)
    for i, coeff in enumerate(a, start=1):
        impulse[i % n_subcarriers] += coeff
    return np.fft.fft(impulse)


def draw_antenna_index(n_antennas, rng):
    """Uniform 1-based antenna index over {1, ..., M}."""
    n_antennas = check_positive_int(n_antennas, "n_antennas")
    rng = as_rng(rng)
    return int(rng.integers(1, n_antennas + 1))


def probe_round(
    round_no,
    channels,
    pilot,
    snr_db,
    rng_secret,
    rng_noise,
    mode="random",
    filter_len=8,
    round_robin_offset=0,
    eve_at_bob=False,
):
    """One bidirectional probing round.

    Downlink: the initiator sends ``pilot * alpha`` through antenna m; the
    responder and the eavesdropper normalize their received signals by the
    public pilot (the filtered pilot is never disclosed).  Uplink: the
    responder sends the plain pilot; the initiator multiplies the received
    signal by ``alpha`` before estimation.  With noise disabled both
    estimates equal ``alpha * H[m]`` exactly.

    When ``eve_at_bob`` is set, the eavesdropper's downlink observation uses
    the reciprocal ab channel instead of her own (position-replay scenario).

    Returns ``(RoundResult, ObfuscationState)``.
    """
    if mode not in CAMPAIGN_MODES:
        raise ParameterError(f"unknown mode {mode!r}; expected one of {CAMPAIGN_MODES}")
    n = channels.ab.n_subcarriers
    pilot = check_pilot(pilot, n)
    rng_secret = as_rng(rng_secret)
    rng_noise = as_rng(rng_noise)

    filtered = mode in _FILTERED and filter_len > 0
    if filtered:
        taps = draw_filter_taps(filter_len, rng_secret)
        alpha = filter_response(taps, n)
    else:
        taps = FilterTaps(np.ones(1))
        alpha = np.ones(n, dtype=complex)
    if mode in _RANDOM_ANTENNA:
        antenna = draw_antenna_index(channels.ab.n_antennas, rng_secret)
    elif mode in ("round_robin", "filtered_round_robin"):
        antenna = round_robin_index(round_no, round_robin_offset, channels.ab.n_antennas)
    else:
        antenna = 1

    ab_row = channels.ab.row(antenna)
    pilot_tx = pilot * alpha

    # Responder's downlink estimate of the filtered channel.
    obs_b = observe(ab_row, pilot_tx, snr_db, rng_noise)
    h_b = estimate_csi(obs_b, pilot)

    # Initiator's uplink estimate: receive the plain pilot, then apply alpha.
    obs_a = observe(ab_row, pilot, snr_db, rng_noise)
    h_a = estimate_csi(obs_a, pilot) * alpha

    eve_down_row = ab_row if eve_at_bob else channels.ae.row(antenna)
    obs_e = observe(eve_down_row, pilot_tx, snr_db, rng_noise)
    h_e_down = estimate_csi(obs_e, pilot)

    obs_e_up = observe(channels.be.row(1), pilot, snr_db, rng_noise)
    h_e_up = estimate_csi(obs_e_up, pilot)

    result = RoundResult(h_a=h_a, h_b=h_b, h_e_down=h_e_down, h_e_up=h_e_up)
    state = ObfuscationState(round_no=round_no, antenna=antenna, taps=taps, alpha=alpha)
    return result, state


@dataclass
class CampaignResult:
    """CSI matrices (N x K, column k = round k) plus the initiator's secrets."""

    h_alice: np.ndarray
    h_bob: np.ndarray
    h_eve_down: np.ndarray
    h_eve_up: np.ndarray
    secrets: list
    antenna_truth: np.ndarray
    door_states: np.ndarray = field(default=None)


def run_probing_campaign(
    n_rounds,
    config,
    seed,
    channel_hook=None,
    eve_at_bob=False,
):
    """Run ``n_rounds`` probe rounds over an evolving channel.

    ``config`` is an ExperimentConfig (or anything exposing the channel and
    obfuscation fields used below).  Three RNG streams are derived from
    ``seed``: channel (initial draw + evolution), secret (taps and antenna
    schedule), and noise, so security experiments can grant noise-level
    knowledge without revealing the obfuscation secrets.

    ``channel_hook(round_no, ChannelSet) -> ChannelSet`` lets attack
    scenarios perturb the instantaneous channel (e.g. a door schedule).
    """
    n_rounds = check_positive_int(n_rounds, "n_rounds")
    if config.mode not in CAMPAIGN_MODES:
        raise ParameterError(f"unknown mode {config.mode!r}; expected one of {CAMPAIGN_MODES}")
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    ch_seq, secret_seq, noise_seq = seq.spawn(3)
    rng_secret = np.random.default_rng(secret_seq)
    rng_noise = np.random.default_rng(noise_seq)

    n = config.n_subcarriers
    m = config.n_antennas
    params = EvolutionParams(rho_t=config.rho_t, tap_count=config.tap_count)
    pilot = np.ones(n, dtype=complex)

    smooth = config.evolution == "smooth"
    if smooth:
        ab_rng, ae_rng, be_rng = (np.random.default_rng(s) for s in ch_seq.spawn(3))
        faders = (
            SmoothFader(m, n, params, ab_rng),
            SmoothFader(m, n, params, ae_rng),
            SmoothFader(1, n, params, be_rng),
        )
        channels = ChannelSet(*(f.channel() for f in faders))
        ch_rng = None
    else:
        channels = generate_channel_set(m, n, params, ch_seq)
        ch_rng = np.random.default_rng(ch_seq.spawn(1)[0])

    h_alice = np.empty((n, n_rounds), dtype=complex)
    h_bob = np.empty((n, n_rounds), dtype=complex)
    h_eve_down = np.empty((n, n_rounds), dtype=complex)
    h_eve_up = np.empty((n, n_rounds), dtype=complex)
    secrets = []
    antenna_truth = np.empty(n_rounds, dtype=int)

    for k in range(1, n_rounds + 1):
        instant = channels if channel_hook is None else channel_hook(k, channels)
        result, state = probe_round(
            k,
            instant,
            pilot,
            config.snr_db,
            rng_secret,
            rng_noise,
            mode=config.mode,
            filter_len=config.filter_len,
            round_robin_offset=config.round_robin_offset,
            eve_at_bob=eve_at_bob,
        )
        h_alice[:, k - 1] = result.h_a
        h_bob[:, k - 1] = result.h_b
        h_eve_down[:, k - 1] = result.h_e_down
        h_eve_up[:, k - 1] = result.h_e_up
        secrets.append(state)
        antenna_truth[k - 1] = state.antenna

        if k < n_rounds:
            if smooth:
                for f in faders:
                    f.step()
                channels = ChannelSet(*(f.channel() for f in faders))
            elif config.rho_t < 1.0:
                channels = ChannelSet(
                    ab=evolve(channels.ab, config.rho_t, ch_rng),
                    ae=evolve(channels.ae, config.rho_t, ch_rng),
                    be=evolve(channels.be, config.rho_t, ch_rng),
                )

    return CampaignResult(
        h_alice=h_alice,
        h_bob=h_bob,
        h_eve_down=h_eve_down,
        h_eve_up=h_eve_up,
        secrets=secrets,
        antenna_truth=antenna_truth,
    )
