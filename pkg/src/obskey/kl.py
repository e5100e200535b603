"""Block rearrangement, covariance eigenbasis, and shared-basis projection.

The initiating party fits the basis on its own CSI matrix and publishes the
selected eigenvector rows; the responder only ever projects with the
published basis (``KLTransform`` fitted by one party, ``transform`` called by
both), which is also what makes the basis file an attacker-visible artifact.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import ParameterError
from .validation import check_csi_matrix, check_fraction, check_positive_int


@dataclass(frozen=True)
class BlockShape:
    """Block geometry: len_freq subcarriers x len_time rounds per block."""

    len_freq: int
    len_time: int

    def __post_init__(self):
        check_positive_int(self.len_freq, "len_freq")
        check_positive_int(self.len_time, "len_time")

    @property
    def block_dim(self):
        return self.len_freq * self.len_time


@dataclass
class RearrangedMatrix:
    """Blocks vectorized column-major into columns; invertible by design.

    Columns are ordered frequency-chunk-major with the time-block index
    running fastest, so consecutive columns of one chunk are consecutive in
    time.
    """

    data: np.ndarray
    shape: BlockShape
    n_subcarriers: int
    n_rounds: int  # possibly truncated to a multiple of len_time


@dataclass
class TransformBasis:
    """Eigendecomposition of the block sample covariance.

    ``eigenvectors`` holds all columns sorted by descending eigenvalue;
    ``projection`` is the first ``n_components`` eigenvectors, conjugate
    transposed, ready to left-multiply a rearranged matrix.
    """

    eigenvectors: np.ndarray
    eigenvalues: np.ndarray
    n_components: int
    energy_fraction: float
    shape: BlockShape

    @property
    def projection(self):
        return self.eigenvectors[:, : self.n_components].conj().T


@dataclass
class TransformedMatrix:
    data: np.ndarray
    shape: BlockShape


def rearrange(csi, shape):
    """Segment an N x K CSI matrix into blocks and vectorize each block.

    Trailing rounds are dropped (with a warning) when the time length does
    not divide K; the frequency length must divide N exactly.
    """
    csi = check_csi_matrix(csi)
    if csi.ndim != 2:
        raise ParameterError("rearrange expects an N x K matrix")
    n, k = csi.shape
    if n % shape.len_freq != 0:
        raise ParameterError(f"len_freq={shape.len_freq} does not divide N={n}")
    if k < shape.len_time:
        raise ParameterError(f"need at least len_time={shape.len_time} rounds, got {k}")
    n_time_blocks = k // shape.len_time
    k_used = n_time_blocks * shape.len_time
    if k_used != k:
        warnings.warn(f"truncating {k - k_used} trailing rounds to fit {shape.len_time}-round blocks")
        csi = csi[:, :k_used]
    n_freq_blocks = n // shape.len_freq
    # axes: (freq_block, subcarrier_in_block, time_block, round_in_block)
    blocks = csi.reshape(n_freq_blocks, shape.len_freq, n_time_blocks, shape.len_time)
    # columns ordered (freq_block, time_block), time fastest; within a column
    # the subcarrier index runs fastest (column-major block vectorization)
    data = blocks.transpose(0, 2, 3, 1).reshape(n_freq_blocks * n_time_blocks, shape.block_dim)
    return RearrangedMatrix(data=data.T.copy(), shape=shape, n_subcarriers=n, n_rounds=k_used)


def unrearrange(rearranged):
    """Inverse of ``rearrange`` (exact round-trip)."""
    shape = rearranged.shape
    n, k = rearranged.n_subcarriers, rearranged.n_rounds
    n_freq_blocks = n // shape.len_freq
    n_time_blocks = k // shape.len_time
    cols = rearranged.data.T.reshape(
        n_freq_blocks, n_time_blocks, shape.len_time, shape.len_freq
    )
    out = np.empty((n, k), dtype=complex)
    for fb in range(n_freq_blocks):
        for tb in range(n_time_blocks):
            block = cols[fb, tb].T  # len_freq x len_time
            out[
                fb * shape.len_freq : (fb + 1) * shape.len_freq,
                tb * shape.len_time : (tb + 1) * shape.len_time,
            ] = block
    return out


def compute_basis(rearranged, energy_fraction, center=False):
    """Hermitian eigendecomposition of R = (1/C) X X^H with minimal prefix
    reaching the requested energy fraction."""
    check_fraction(energy_fraction, "energy_fraction", inclusive_low=False)
    data = rearranged.data
    if data.shape[1] < 2:
        raise ParameterError("need at least 2 block columns to estimate a covariance")
    if center:
        data = data - data.mean(axis=1, keepdims=True)
    cov = (data @ data.conj().T) / data.shape[1]
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    eigenvalues = eigenvalues[::-1].copy()
    eigenvectors = eigenvectors[:, ::-1].copy()
    total = float(eigenvalues.sum())
    if total <= 0:
        raise ParameterError("degenerate (rank-0) input: zero total energy")
    cumulative = np.cumsum(np.maximum(eigenvalues, 0.0))
    n_components = int(np.searchsorted(cumulative, energy_fraction * total, side="left") + 1)
    n_components = min(n_components, len(eigenvalues))
    return TransformBasis(
        eigenvectors=eigenvectors,
        eigenvalues=eigenvalues,
        n_components=n_components,
        energy_fraction=energy_fraction,
        shape=rearranged.shape,
    )


def apply_transform(basis, rearranged):
    """Project block columns onto the selected eigenvector rows."""
    if rearranged.data.shape[0] != basis.eigenvectors.shape[0]:
        raise ParameterError(
            f"block dimension mismatch: basis {basis.eigenvectors.shape[0]}, "
            f"data {rearranged.data.shape[0]}"
        )
    return TransformedMatrix(data=basis.projection @ rearranged.data, shape=rearranged.shape)


def basis_leakage(n_subcarriers, n_rounds, shape):
    """Leakage ratio of publishing the basis: 1 / (number of blocks)."""
    n_freq_blocks = n_subcarriers // shape.len_freq
    n_time_blocks = n_rounds // shape.len_time
    if n_freq_blocks < 1 or n_time_blocks < 1:
        raise ParameterError("shape does not tile the matrix")
    return 1.0 / (n_freq_blocks * n_time_blocks)


class KLTransform(TransformerMixin, BaseEstimator):
    """Decorrelating transform fitted on one party's CSI and shared.

    Parameters
    ----------
    block_len_freq : int or None
        Subcarriers per block; None means the full band (N).
    block_len_time : int
        Rounds per block.
    energy_fraction : float
        Minimal eigenvalue-prefix energy retained by the projection.
    center : bool
        Subtract the column mean before the covariance (off by default; the
        decomposition operates on the raw second moment).
    """

    def __init__(self, block_len_freq=None, block_len_time=2, energy_fraction=0.999, center=False):
        self.block_len_freq = block_len_freq
        self.block_len_time = block_len_time
        self.energy_fraction = energy_fraction
        self.center = center

    def _shape_for(self, csi):
        len_freq = self.block_len_freq or csi.shape[0]
        return BlockShape(len_freq=len_freq, len_time=self.block_len_time)

    def fit(self, csi, y=None):
        csi = check_csi_matrix(csi)
        rearranged = rearrange(csi, self._shape_for(csi))
        self.basis_ = compute_basis(rearranged, self.energy_fraction, center=self.center)
        return self

    def transform(self, csi):
        if not hasattr(self, "basis_"):
            raise ParameterError("KLTransform must be fitted before transform")
        csi = check_csi_matrix(csi)
        rearranged = rearrange(csi, self._shape_for(csi))
        return apply_transform(self.basis_, rearranged)

    def leakage(self, csi_shape):
        n, k = csi_shape
        shape = BlockShape(self.block_len_freq or n, self.block_len_time)
        return basis_leakage(n, k, shape)
