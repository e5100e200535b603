"""Key-quality metrics: mismatch rate, generation rate, repeated-segment
diagnostic, and amplitude correlation."""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError
from .validation import check_bits, check_positive_int


@dataclass
class KeyMetrics:
    bmr: float
    bgr: float
    total_bits: int
    n_rounds: int


@dataclass
class NdDistribution:
    group_size: int
    distances: np.ndarray
    histogram: np.ndarray  # empirical pmf over 0..G
    reference: np.ndarray  # Binomial(G, 1/2) pmf
    tv_distance: float

    @property
    def n_pairs(self):
        return len(self.distances)


def bmr(bits_a, bits_b):
    """Fraction of disagreeing positions between equal-length bit strings."""
    bits_a = check_bits(bits_a, "bits_a")
    bits_b = check_bits(bits_b, "bits_b")
    if len(bits_a) != len(bits_b):
        raise ParameterError(f"length mismatch: {len(bits_a)} vs {len(bits_b)}")
    return float(np.mean(bits_a != bits_b))


def bgr(raw_key_bits, n_rounds):
    """Raw key bits generated per probing round."""
    check_positive_int(n_rounds, "n_rounds")
    return len(raw_key_bits) / n_rounds


def binomial_reference(group_size):
    """Binomial(G, 1/2) pmf computed in log space, renormalized."""
    d = np.arange(group_size + 1)
    log_pmf = (
        gammaln(group_size + 1)
        - gammaln(d + 1)
        - gammaln(group_size - d + 1)
        - group_size * np.log(2.0)
    )
    pmf = np.exp(log_pmf)
    return pmf / pmf.sum()


def nd_distribution(bits, group_size=128):
    """Hamming distances between adjacent non-overlapping groups of the key,
    with the ideal independent-bits reference and the total-variation gap."""
    bits = check_bits(bits, "bits")
    check_positive_int(group_size, "group_size")
    if len(bits) < 2 * group_size:
        raise ParameterError(
            f"need at least {2 * group_size} bits for adjacent groups, got {len(bits)}"
        )
    n_groups = len(bits) // group_size
    groups = bits[: n_groups * group_size].reshape(n_groups, group_size).astype(np.int16)
    distances = np.abs(np.diff(groups, axis=0)).sum(axis=1)
    histogram = np.bincount(distances, minlength=group_size + 1).astype(float)
    histogram /= histogram.sum()
    reference = binomial_reference(group_size)
    tv = 0.5 * float(np.abs(histogram - reference).sum())
    return NdDistribution(
        group_size=group_size,
        distances=distances,
        histogram=histogram,
        reference=reference,
        tv_distance=tv,
    )


def cross_correlation(h1, h2):
    """Pearson correlation of amplitude profiles.

    Vectors give a scalar; N x K matrices give the per-round correlation
    distribution (one value per column).
    """
    a = np.abs(np.asarray(h1))
    b = np.abs(np.asarray(h2))
    if a.shape != b.shape:
        raise ParameterError(f"shape mismatch: {a.shape} vs {b.shape}")

    def pearson(x, y):
        sx, sy = x.std(), y.std()
        if sx == 0.0 or sy == 0.0:
            raise ParameterError("zero-variance input: correlation undefined")
        return float(np.corrcoef(x, y)[0, 1])

    if a.ndim == 1:
        return pearson(a, b)
    return np.array([pearson(a[:, k], b[:, k]) for k in range(a.shape[1])])
