"""Synthetic multi-antenna OFDM channel model.

A spatial channel is a bank of time-domain multipath taps per antenna; the
per-subcarrier response is the N-point DFT of the (zero-padded) tap vector,
so rows are smooth across subcarriers whenever the tap count is much smaller
than the subcarrier count.

Two temporal evolution laws are provided:

* ``evolve`` - a first-order Gauss-Markov step on the taps (memoryless
  increments).  Simple, but its sample paths are random-walk-like at every
  timescale.
* ``SmoothFader`` - a sum-of-sinusoids (Clarke/Jakes style) trajectory whose
  lag-1 autocorrelation is calibrated to the same ``rho_t`` parameter via the
  Bessel J0 Doppler spectrum.  Paths are band-limited and inertial, which is
  what stationary indoor links at multi-second probing intervals look like.
  Campaigns use this model by default (see the decisions in probing/config).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import j0

from .errors import ParameterError
from .validation import as_rng, check_fraction, check_pilot, check_positive_int

DEFAULT_TAP_COUNT = 7
# Last tap carries ~1% of the first tap's power.
DEFAULT_PROFILE_FLOOR = 0.01


def exponential_power_profile(tap_count, floor=DEFAULT_PROFILE_FLOOR):
    """Per-tap variances decaying exponentially, normalized to unit total."""
    tap_count = check_positive_int(tap_count, "tap_count")
    if tap_count == 1:
        return np.ones(1)
    ratio = floor ** (1.0 / (tap_count - 1))
    profile = ratio ** np.arange(tap_count)
    return profile / profile.sum()


@dataclass
class EvolutionParams:
    """Temporal/multipath parameters of the synthetic channel."""

    rho_t: float = 0.9999999
    tap_count: int = DEFAULT_TAP_COUNT
    power_profile: np.ndarray = None

    def __post_init__(self):
        check_fraction(self.rho_t, "rho_t")
        check_positive_int(self.tap_count, "tap_count")
        if self.power_profile is None:
            self.power_profile = exponential_power_profile(self.tap_count)
        self.power_profile = np.asarray(self.power_profile, dtype=float)
        if self.power_profile.shape != (self.tap_count,):
            raise ParameterError("power_profile length must equal tap_count")
        if np.any(self.power_profile <= 0):
            raise ParameterError("power_profile entries must be positive")
        if abs(self.power_profile.sum() - 1.0) > 1e-9:
            raise ParameterError("power_profile must sum to 1")


@dataclass
class SpatialChannel:
    """M x N frequency response derived from per-antenna time-domain taps."""

    taps: np.ndarray  # (M, tap_count) complex
    n_subcarriers: int
    power_profile: np.ndarray

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=complex)
        if self.taps.ndim != 2:
            raise ParameterError("taps must be a 2-D (antennas x taps) array")
        if self.n_subcarriers < self.taps.shape[1]:
            raise ParameterError("subcarrier count must be >= tap count")

    @property
    def n_antennas(self):
        return self.taps.shape[0]

    @property
    def entries(self):
        """M x N response: row m is the N-point DFT of antenna m's taps."""
        return np.fft.fft(self.taps, n=self.n_subcarriers, axis=1)

    def row(self, antenna_index):
        """Frequency response of a 1-based antenna index."""
        if not 1 <= antenna_index <= self.n_antennas:
            raise ParameterError(f"antenna index {antenna_index} outside [1, {self.n_antennas}]")
        return np.fft.fft(self.taps[antenna_index - 1], n=self.n_subcarriers)


@dataclass
class ChannelSet:
    """The three links of one simulation instant.

    ``ab`` is shared by both probing directions (reciprocity); ``ae`` and
    ``be`` are drawn independently of ``ab`` because the eavesdropper is
    assumed at least half a wavelength away from both endpoints.
    """

    ab: SpatialChannel
    ae: SpatialChannel
    be: SpatialChannel  # single row: Bob -> Eve


@dataclass
class ProbeObservation:
    y: np.ndarray
    snr_db: float


def _draw_taps(rng, n_antennas, profile):
    scale = np.sqrt(profile / 2.0)
    shape = (n_antennas, len(profile))
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * scale


def generate_channel_set(n_antennas, n_subcarriers, params, seed):
    """Draw ab/ae/be channels from independent streams derived from ``seed``."""
    n_antennas = check_positive_int(n_antennas, "n_antennas")
    n_subcarriers = check_positive_int(n_subcarriers, "n_subcarriers")
    if n_subcarriers < params.tap_count:
        raise ParameterError("n_subcarriers must be >= tap_count")
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    ab_rng, ae_rng, be_rng = (np.random.default_rng(s) for s in seq.spawn(3))
    make = lambda rng, m: SpatialChannel(
        _draw_taps(rng, m, params.power_profile), n_subcarriers, params.power_profile
    )
    return ChannelSet(
        ab=make(ab_rng, n_antennas), ae=make(ae_rng, n_antennas), be=make(be_rng, 1)
    )


def evolve(channel, rho_t, rng):
    """One Gauss-Markov step: rho_t * taps + sqrt(1 - rho_t^2) * innovation.

    Per-tap variance is preserved; the frequency rows are recomputed lazily
    from the new taps.  ``rng`` may be a Generator or a seed.
    """
    check_fraction(rho_t, "rho_t")
    rng = as_rng(rng)
    innovation = _draw_taps(rng, channel.n_antennas, channel.power_profile)
    new_taps = rho_t * channel.taps + np.sqrt(1.0 - rho_t * rho_t) * innovation
    return SpatialChannel(new_taps, channel.n_subcarriers, channel.power_profile)


_J0_FIRST_ZERO = 2.404825557695773


def doppler_rate_for_rho(rho_t):
    """Max angular Doppler step per round such that J0(w) == rho_t at lag 1."""
    check_fraction(rho_t, "rho_t")
    if rho_t >= 1.0:
        return 0.0
    if rho_t <= j0(_J0_FIRST_ZERO):
        return _J0_FIRST_ZERO
    return brentq(lambda w: j0(w) - rho_t, 0.0, _J0_FIRST_ZERO)


@dataclass
class SmoothFader:
    """Band-limited fading trajectory for one spatial channel.

    Each tap is a sum of ``n_sinusoids`` unit phasors with random angles of
    arrival; stepping multiplies each phasor by a fixed per-sinusoid rotation,
    so the trajectory is deterministic given its initial draw and exactly
    stationary with per-tap variance equal to the power profile.
    """

    n_antennas: int
    n_subcarriers: int
    params: EvolutionParams
    rng: np.random.Generator
    n_sinusoids: int = 16
    phasors: np.ndarray = field(init=False)
    rates: np.ndarray = field(init=False)

    def __post_init__(self):
        shape = (self.n_antennas, self.params.tap_count, self.n_sinusoids)
        w_max = doppler_rate_for_rho(self.params.rho_t)
        arrival = self.rng.uniform(0.0, 2.0 * np.pi, shape)
        phase = self.rng.uniform(0.0, 2.0 * np.pi, shape)
        self.rates = np.exp(1j * w_max * np.cos(arrival))
        self.phasors = np.exp(1j * phase)

    def channel(self):
        amp = np.sqrt(self.params.power_profile / self.n_sinusoids)
        taps = (self.phasors.sum(axis=2)) * amp[None, :]
        return SpatialChannel(taps, self.n_subcarriers, self.params.power_profile)

    def step(self):
        self.phasors = self.phasors * self.rates


def observe(channel_row, pilot, snr_db, rng):
    """Receive ``channel_row * pilot`` plus complex Gaussian noise.

    The noise variance is set against the mean received-signal power so that
    E|ch*S|^2 / E|z|^2 matches ``snr_db``.  ``snr_db=inf`` disables noise.
    """
    channel_row = np.asarray(channel_row, dtype=complex)
    pilot = check_pilot(pilot, len(channel_row))
    signal = channel_row * pilot
    if np.isinf(snr_db):
        return ProbeObservation(y=signal, snr_db=snr_db)
    rng = as_rng(rng)
    snr = 10.0 ** (snr_db / 10.0)
    noise_var = float(np.mean(np.abs(signal) ** 2)) / snr
    n = len(signal)
    noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.sqrt(noise_var / 2.0)
    return ProbeObservation(y=signal + noise, snr_db=snr_db)


def estimate_csi(observation, pilot):
    """Least-squares per-subcarrier estimate y / S."""
    y = np.asarray(observation.y, dtype=complex)
    pilot = check_pilot(pilot, len(y))
    return y / pilot


def round_robin_index(round_no, offset, n_antennas):
    """Deterministic scheduling: ((k + c - 1) mod M) + 1, 1-based."""
    round_no = check_positive_int(round_no, "round_no")
    n_antennas = check_positive_int(n_antennas, "n_antennas")
    if not 0 <= offset <= n_antennas - 1:
        raise ParameterError(f"offset must lie in [0, {n_antennas - 1}], got {offset}")
    return ((round_no + offset - 1) % n_antennas) + 1
