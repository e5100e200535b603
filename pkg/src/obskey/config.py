"""Experiment configuration: flat key=value text with CLI-style overrides.

Defaults correspond to the tuned operating point: 8 antennas, 512
subcarriers, 1000 rounds, 8-tap secret filter, 99.9% retained energy,
2-bit first component, 64-sample windows.
"""

from dataclasses import dataclass, fields, replace

from .errors import ParameterError
from .probing import CAMPAIGN_MODES
from .quantizer import PART_MODES
from .reconcile import DIGESTS

EVOLUTION_MODELS = ("smooth", "gauss_markov")
EXTRACTION_MODES = ("kl", "direct")
KMEANS_FEATURES = ("complex", "amplitude")


@dataclass
class ExperimentConfig:
    # channel
    n_antennas: int = 8
    n_subcarriers: int = 512
    n_rounds: int = 1000
    snr_db: float = 32.0
    rho_t: float = 0.9999999
    tap_count: int = 7
    evolution: str = "smooth"
    # obfuscation
    mode: str = "random"
    filter_len: int = 8
    round_robin_offset: int = 0
    # transform
    extraction: str = "kl"
    block_len_freq: int = 0  # 0 means the full band (N)
    block_len_time: int = 2
    energy_fraction: float = 0.999
    center: bool = False
    # quantizer
    first_component_bits: int = 2
    other_component_bits: int = 1
    window_len: int = 64
    guard_fraction: float = 0.1
    part_mode: str = "real_imag"
    adaptive_window: bool = False
    # reconciliation
    digest: str = "md5"
    # attacks
    door_period: int = 40
    replay_offset: int = 1
    group_size: int = 128
    cluster_restarts: int = 50
    kmeans_feature: str = "complex"
    # reproducibility
    seed: int = 0
    dump_secrets: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.mode not in CAMPAIGN_MODES:
            raise ParameterError(f"mode must be one of {CAMPAIGN_MODES}, got {self.mode!r}")
        if self.evolution not in EVOLUTION_MODELS:
            raise ParameterError(f"evolution must be one of {EVOLUTION_MODELS}")
        if self.extraction not in EXTRACTION_MODES:
            raise ParameterError(f"extraction must be one of {EXTRACTION_MODES}")
        if self.part_mode not in PART_MODES:
            raise ParameterError(f"part_mode must be one of {PART_MODES}")
        if self.digest not in DIGESTS:
            raise ParameterError(f"digest must be one of {sorted(DIGESTS)}")
        if self.kmeans_feature not in KMEANS_FEATURES:
            raise ParameterError(f"kmeans_feature must be one of {KMEANS_FEATURES}")
        for name in ("n_antennas", "n_subcarriers", "n_rounds", "tap_count", "block_len_time"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1")
        if not 0.0 <= self.rho_t <= 1.0:
            raise ParameterError("rho_t must lie in [0, 1]")
        if self.filter_len < 0:
            raise ParameterError("filter_len must be >= 0 (0 disables filtering)")
        if self.block_len_freq and self.n_subcarriers % self.block_len_freq != 0:
            raise ParameterError("block_len_freq must divide n_subcarriers")
        if not 0.0 < self.energy_fraction <= 1.0:
            raise ParameterError("energy_fraction must lie in (0, 1]")
        return self

    @property
    def effective_block_len_freq(self):
        return self.block_len_freq or self.n_subcarriers

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)


DESK_PRESET = {"n_subcarriers": 128, "n_rounds": 200}


def _parse_value(field_type, raw, key):
    raw = raw.strip()
    if field_type is bool:
        lowered = raw.lower()
        if lowered in ("true", "1", "yes", "on"):
            return True
        if lowered in ("false", "0", "no", "off"):
            return False
        raise ParameterError(f"cannot parse boolean for {key}: {raw!r}")
    try:
        if field_type is int:
            return int(raw)
        if field_type is float:
            return float(raw)
    except ValueError as exc:
        raise ParameterError(f"cannot parse {key}={raw!r}: {exc}") from None
    return raw


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_PY_TYPES = {"int": int, "float": float, "bool": bool, "str": str}


def parse_assignments(pairs):
    """Parse ['key=value', ...] into a typed override dict."""
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise ParameterError(f"expected key=value, got {pair!r}")
        key, _, raw = pair.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ParameterError(f"unknown configuration key {key!r}")
        ftype = _FIELD_TYPES[key]
        ftype = _PY_TYPES.get(ftype, ftype) if isinstance(ftype, str) else ftype
        overrides[key] = _parse_value(ftype, raw, key)
    return overrides


def load_config(path=None, overrides=(), preset=None):
    """Build a config from an optional key=value file plus override pairs."""
    values = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
        pairs = [ln for ln in lines if ln and not ln.startswith("#")]
        values.update(parse_assignments(pairs))
    if preset == "desk":
        values.update(DESK_PRESET)
    elif preset is not None:
        raise ParameterError(f"unknown preset {preset!r}")
    values.update(parse_assignments(list(overrides)))
    return ExperimentConfig(**values)


def save_config(config, path):
    """Write the flat key=value form (diff-able experiment record)."""
    with open(path, "w", encoding="utf-8") as fh:
        for f in fields(ExperimentConfig):
            fh.write(f"{f.name}={getattr(config, f.name)}\n")
