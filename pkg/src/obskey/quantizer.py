"""Adaptive multi-level quantization of transformed coefficients.

Per component row and per part (real, then imaginary), non-overlapping
windows slide over the coefficient sequence.  Within a window, cell
boundaries sit at empirical quantiles and a guard band of fixed rank width is
dropped around each boundary; decisions are taken in rank space with ties
broken by original position, so both parties reproduce identical layouts and
exchange only the dropped positions.  Cells are Gray coded and bits are
concatenated column-major (all components of column 0, then column 1, ...).
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ParameterError
from .validation import check_fraction, check_positive_int

PART_MODES = ("real_imag", "amplitude")


@dataclass
class QuantizerConfig:
    first_component_bits: int = 2
    other_component_bits: int = 1
    window_len: int = 64
    guard_fraction: float = 0.1
    part_mode: str = "real_imag"
    adaptive_window: bool = False

    def __post_init__(self):
        if not 1 <= self.first_component_bits <= 4:
            raise ParameterError("first_component_bits must lie in [1, 4]")
        if not 1 <= self.other_component_bits <= 4:
            raise ParameterError("other_component_bits must lie in [1, 4]")
        check_positive_int(self.window_len, "window_len", minimum=2)
        check_fraction(self.guard_fraction, "guard_fraction", high=0.5, inclusive_high=False)
        if self.part_mode not in PART_MODES:
            raise ParameterError(f"part_mode must be one of {PART_MODES}")


@dataclass
class RawKey:
    """Per-sample quantization cells with provenance and the party's own
    guard-band survivor mask.

    ``cells``/``kept`` have shape (components, parts, columns); ``levels``
    gives each component's bit depth.  ``bits`` emits the own-masked key;
    cross-party comparison goes through ``apply_mask_intersection``.
    """

    cells: np.ndarray
    kept: np.ndarray
    levels: np.ndarray
    window_len: int
    part_mode: str

    @property
    def bits(self):
        return emit_bits(self.cells, self.kept, self.levels)

    def __len__(self):
        per_sample = self.levels[:, None, None] * np.ones_like(self.cells)
        return int(per_sample[self.kept & (self.cells >= 0)].sum())


def assign_levels(basis, noise_floor, config):
    """Per-component bit depths: the first component gets the deep setting,
    the rest one bit, and any component whose eigenvalue sits below four
    times the noise floor is demoted to a single bit."""
    n = basis.n_components
    if n < 1:
        raise ParameterError("basis selects no components")
    levels = np.full(n, config.other_component_bits, dtype=int)
    levels[0] = config.first_component_bits
    demoted = basis.eigenvalues[:n] < 4.0 * noise_floor
    levels[demoted] = np.minimum(levels[demoted], 1)
    return levels


def window_thresholds(values, n_bits, guard_fraction):
    """Rank-space thresholds and guard intervals for one window.

    Returns ``(boundaries, kept, cells)`` where ``boundaries`` are the rank
    positions of the 2^b - 1 quantile thresholds, ``kept`` flags samples
    outside every guard interval, and ``cells`` maps each sample to its
    quantile cell.  The guard interval around each boundary removes
    ``round(len * guard / 2^b / 2)`` order statistics per side, i.e. total
    probability mass ``guard / 2^b`` centred on the threshold in rank space.
    """
    values = np.asarray(values, dtype=float)
    length = values.size
    n_cells = 1 << n_bits
    if length < n_cells:
        raise ParameterError(f"window of {length} too small for {n_cells} cells")
    check_fraction(guard_fraction, "guard_fraction", high=0.5, inclusive_high=False)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(length, dtype=int)
    ranks[order] = np.arange(length)
    boundaries = [round(length * i / n_cells) for i in range(1, n_cells)]
    half_guard = round(guard_fraction * length / (2 * n_cells))
    kept = np.ones(length, dtype=bool)
    for b in boundaries:
        lo, hi = max(0, b - half_guard), min(length, b + half_guard)
        kept[order[lo:hi]] = False
    cells = np.zeros(length, dtype=int)
    for b in boundaries:
        cells += ranks >= b
    return np.asarray(boundaries, dtype=int), kept, cells


def gray_encode(cell, n_bits):
    """Reflected Gray code of a cell index as an MSB-first bit array."""
    n_cells = 1 << n_bits
    if not 0 <= cell < n_cells:
        raise ParameterError(f"cell {cell} outside [0, {n_cells})")
    code = cell ^ (cell >> 1)
    return np.array([(code >> (n_bits - 1 - i)) & 1 for i in range(n_bits)], dtype=np.uint8)


def _component_parts(row, part_mode):
    if part_mode == "real_imag":
        return (row.real, row.imag)
    return (np.abs(row),)


def _window_spans(n_samples, window_len, n_cells, variances=None, median_var=None):
    """Non-overlapping spans of ``window_len``; the trailing partial window
    is kept only when it holds at least ``2 * n_cells`` samples.  With the
    adaptive rule, windows whose variance exceeds twice the campaign median
    are halved (never below the cell count)."""
    if window_len < n_cells:
        raise ParameterError(f"window_len={window_len} too small for {n_cells} cells")
    spans = []
    pos = 0
    while pos < n_samples:
        length = min(window_len, n_samples - pos)
        if length < window_len and length < 2 * n_cells:
            break  # trailing partial too short to quantize
        if variances is not None and length == window_len:
            half = window_len // 2
            if half >= n_cells and np.var(variances[pos : pos + length]) > 2.0 * median_var:
                length = half
        spans.append((pos, pos + length))
        pos += length
    return spans


def quantize(transformed, basis, config, noise_floor=0.0, levels=None):
    """Quantize a transformed matrix into a RawKey plus the public message of
    dropped sample positions.

    The key layout (which samples exist, their window membership, their bit
    depth) is identical for both parties; only the cells and the guard
    survivors differ, and the dropped positions are exchanged publicly so the
    counterpart can apply the mask intersection.  ``levels`` overrides the
    basis-derived bit depths (used by the no-transform baseline).
    """
    data = transformed.data
    if data.size == 0:
        raise ParameterError("empty transformed matrix")
    if levels is None:
        levels = assign_levels(basis, noise_floor, config)
    levels = np.asarray(levels, dtype=int)
    if levels.shape != (data.shape[0],):
        raise ParameterError("levels length must match component count")
    n_components = len(levels)
    n_parts = 2 if config.part_mode == "real_imag" else 1
    n_columns = data.shape[1]

    cells = -np.ones((n_components, n_parts, n_columns), dtype=int)
    kept = np.zeros((n_components, n_parts, n_columns), dtype=bool)

    for comp in range(n_components):
        n_bits = int(levels[comp])
        n_cells = 1 << n_bits
        for part, seq in enumerate(_component_parts(data[comp], config.part_mode)):
            variances = seq if config.adaptive_window else None
            median_var = None
            if config.adaptive_window:
                full = [
                    np.var(seq[p : p + config.window_len])
                    for p in range(0, len(seq) - config.window_len + 1, config.window_len)
                ]
                median_var = np.median(full) if full else 0.0
            for start, stop in _window_spans(
                n_columns, config.window_len, n_cells, variances, median_var
            ):
                _, window_kept, window_cells = window_thresholds(
                    seq[start:stop], n_bits, config.guard_fraction
                )
                cells[comp, part, start:stop] = window_cells
                kept[comp, part, start:stop] = window_kept

    key = RawKey(
        cells=cells,
        kept=kept,
        levels=levels,
        window_len=config.window_len,
        part_mode=config.part_mode,
    )
    return key, dropped_positions(key)


def dropped_positions(key):
    """Public kept-index message: (component, part, column) of every sample
    the party dropped (guard bands and unquantized tails)."""
    in_window = key.cells >= 0
    comp, part, col = np.nonzero(in_window & ~key.kept)
    return np.stack([comp, part, col], axis=1)


_GRAY_BIT_CACHE = {}


def _gray_bits_table(n_bits):
    if n_bits not in _GRAY_BIT_CACHE:
        table = np.zeros((1 << n_bits, n_bits), dtype=np.uint8)
        for cell in range(1 << n_bits):
            table[cell] = gray_encode(cell, n_bits)
        _GRAY_BIT_CACHE[n_bits] = table
    return _GRAY_BIT_CACHE[n_bits]


def emit_bits(cells, kept, levels):
    """Column-major bit emission: for each column, each component's parts in
    order, Gray bits MSB first."""
    n_components, n_parts, n_columns = cells.shape
    usable = (kept & (cells >= 0)).transpose(2, 0, 1).ravel()
    if not usable.any():
        return np.zeros(0, dtype=np.uint8)
    flat_cells = cells.transpose(2, 0, 1).ravel()[usable]
    flat_levels = np.broadcast_to(
        np.asarray(levels, dtype=int)[None, :, None], (n_columns, n_components, n_parts)
    ).ravel()[usable]
    offsets = np.concatenate([[0], np.cumsum(flat_levels)])
    out = np.empty(offsets[-1], dtype=np.uint8)
    for n_bits in np.unique(flat_levels):
        mask = flat_levels == n_bits
        table = _gray_bits_table(int(n_bits))
        positions = offsets[:-1][mask][:, None] + np.arange(n_bits)[None, :]
        out[positions.ravel()] = table[flat_cells[mask]].ravel()
    return out


def apply_mask_intersection(key_a, key_b):
    """Emit both parties' bit strings restricted to mutually kept samples.

    The two keys must share layout (same levels, same window structure); the
    outputs always have equal length.
    """
    if key_a.cells.shape != key_b.cells.shape or not np.array_equal(key_a.levels, key_b.levels):
        raise ParameterError("raw keys have mismatched layout")
    shared = key_a.kept & key_b.kept
    bits_a = emit_bits(key_a.cells, shared, key_a.levels)
    bits_b = emit_bits(key_b.cells, shared, key_b.levels)
    return bits_a, bits_b


class AdaptiveQuantizer(BaseEstimator):
    """Estimator wrapper over the quantization functions.

    ``fit`` decides per-component bit depths from a fitted TransformBasis and
    a noise-floor estimate; ``transform`` quantizes a TransformedMatrix into
    a RawKey plus the public dropped-position message.
    """

    def __init__(
        self,
        first_component_bits=2,
        other_component_bits=1,
        window_len=64,
        guard_fraction=0.1,
        part_mode="real_imag",
        adaptive_window=False,
    ):
        self.first_component_bits = first_component_bits
        self.other_component_bits = other_component_bits
        self.window_len = window_len
        self.guard_fraction = guard_fraction
        self.part_mode = part_mode
        self.adaptive_window = adaptive_window

    def _config(self):
        return QuantizerConfig(
            first_component_bits=self.first_component_bits,
            other_component_bits=self.other_component_bits,
            window_len=self.window_len,
            guard_fraction=self.guard_fraction,
            part_mode=self.part_mode,
            adaptive_window=self.adaptive_window,
        )

    def fit(self, basis, noise_floor=0.0):
        self.basis_ = basis
        self.noise_floor_ = float(noise_floor)
        self.levels_ = assign_levels(basis, self.noise_floor_, self._config())
        return self

    def transform(self, transformed):
        if not hasattr(self, "basis_"):
            raise ParameterError("AdaptiveQuantizer must be fitted before transform")
        return quantize(transformed, self.basis_, self._config(), self.noise_floor_)
