"""Seven statistical randomness tests (SP 800-22 subset).

Frequency, block frequency, runs, longest run of ones, serial (both
p-values), approximate entropy, and forward cumulative sums, with the
standard parameter defaults used in the evaluation: block frequency M=128,
serial and approximate entropy at m=2, longest-run block class chosen by
sequence length.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammaincc
from scipy.stats import norm

from .errors import ParameterError
from .validation import check_bits

PASS_THRESHOLD = 0.01

TEST_NAMES = (
    "frequency",
    "block_frequency",
    "runs",
    "longest_run",
    "serial_1",
    "serial_2",
    "approx_entropy",
    "cumulative_sums",
)


@dataclass
class NistReport:
    p_values: dict

    def passes(self, threshold=PASS_THRESHOLD):
        return {name: p >= threshold for name, p in self.p_values.items()}

    @property
    def n_failed(self):
        return sum(1 for p in self.p_values.values() if p < PASS_THRESHOLD)

    @property
    def all_pass(self):
        return self.n_failed == 0


def frequency_test(bits):
    n = len(bits)
    s = abs(int(2 * bits.sum(dtype=np.int64)) - n) / np.sqrt(n)
    return float(erfc(s / np.sqrt(2.0)))


def block_frequency_test(bits, block_len=128):
    n = len(bits)
    n_blocks = n // block_len
    if n_blocks < 1:
        raise ParameterError(f"need at least {block_len} bits for block frequency")
    proportions = bits[: n_blocks * block_len].reshape(n_blocks, block_len).mean(axis=1)
    chi2 = 4.0 * block_len * np.sum((proportions - 0.5) ** 2)
    return float(gammaincc(n_blocks / 2.0, chi2 / 2.0))


def runs_test(bits):
    n = len(bits)
    pi = bits.mean()
    if abs(pi - 0.5) >= 2.0 / np.sqrt(n):
        return 0.0
    v = 1 + int(np.sum(bits[1:] != bits[:-1]))
    num = abs(v - 2.0 * n * pi * (1.0 - pi))
    den = 2.0 * np.sqrt(2.0 * n) * pi * (1.0 - pi)
    return float(erfc(num / den))


_LONGEST_RUN_CLASSES = (
    # (min_n, block_len, v_low, v_high, class probabilities)
    (128, 8, 1, 4, (0.2148, 0.3672, 0.2305, 0.1875)),
    (6272, 128, 4, 9, (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (750000, 10000, 10, 16, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
)


def longest_run_test(bits):
    n = len(bits)
    if n < 128:
        raise ParameterError("longest-run test needs at least 128 bits")
    for min_n, block_len, v_low, v_high, probs in reversed(_LONGEST_RUN_CLASSES):
        if n >= min_n:
            break
    n_blocks = n // block_len
    counts = np.zeros(v_high - v_low + 1, dtype=int)
    blocks = bits[: n_blocks * block_len].reshape(n_blocks, block_len)
    for block in blocks:
        longest = best = 0
        for b in block:
            best = best + 1 if b else 0
            if best > longest:
                longest = best
        counts[min(max(longest, v_low), v_high) - v_low] += 1
    expected = n_blocks * np.asarray(probs)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    dof = len(probs) - 1
    return float(gammaincc(dof / 2.0, chi2 / 2.0))


def _psi_squared(bits, m):
    if m == 0:
        return 0.0
    n = len(bits)
    ext = np.concatenate([bits, bits[: m - 1]])
    # Patterns as integers via sliding window.
    values = np.zeros(n, dtype=np.int64)
    for i in range(m):
        values = (values << 1) | ext[i : i + n]
    counts = np.bincount(values, minlength=1 << m)
    return float((1 << m) / n * np.sum(counts.astype(np.float64) ** 2) - n)


def serial_test(bits, m=2):
    n = len(bits)
    psi_m = _psi_squared(bits, m)
    psi_m1 = _psi_squared(bits, m - 1)
    psi_m2 = _psi_squared(bits, m - 2)
    del1 = psi_m - psi_m1
    del2 = psi_m - 2.0 * psi_m1 + psi_m2
    p1 = float(gammaincc(2 ** (m - 2), del1 / 2.0))
    p2 = float(gammaincc(2 ** (m - 3), del2 / 2.0))
    return p1, p2


def approximate_entropy_test(bits, m=2):
    n = len(bits)

    def phi(mm):
        ext = np.concatenate([bits, bits[: mm - 1]])
        values = np.zeros(n, dtype=np.int64)
        for i in range(mm):
            values = (values << 1) | ext[i : i + n]
        counts = np.bincount(values, minlength=1 << mm).astype(np.float64)
        probs = counts[counts > 0] / n
        return float(np.sum(probs * np.log(probs)))

    ap_en = phi(m) - phi(m + 1)
    chi2 = 2.0 * n * (np.log(2.0) - ap_en)
    return float(gammaincc(2 ** (m - 1), chi2 / 2.0))


def cumulative_sums_test(bits):
    """Forward mode."""
    n = len(bits)
    x = 2 * bits.astype(np.int64) - 1
    z = int(np.abs(np.cumsum(x)).max())
    if z == 0:
        return 1.0
    sqrt_n = np.sqrt(n)
    k1 = np.arange((-n // z + 1) // 4, (n // z - 1) // 4 + 1)
    term1 = np.sum(
        norm.cdf((4 * k1 + 1) * z / sqrt_n) - norm.cdf((4 * k1 - 1) * z / sqrt_n)
    )
    k2 = np.arange((-n // z - 3) // 4, (n // z - 1) // 4 + 1)
    term2 = np.sum(
        norm.cdf((4 * k2 + 3) * z / sqrt_n) - norm.cdf((4 * k2 + 1) * z / sqrt_n)
    )
    return float(min(max(1.0 - term1 + term2, 0.0), 1.0))


def nist_suite(bits, block_frequency_len=128, serial_m=2, approx_entropy_m=2):
    """Run the seven tests and collect p-values.

    Sequences shorter than 1024 bits trigger a warning; shorter than 100 an
    error (the asymptotic distributions are meaningless there).
    """
    bits = check_bits(bits, "bits", min_len=1)
    n = len(bits)
    if n < 100:
        raise ParameterError(f"need at least 100 bits for the test suite, got {n}")
    if n < 1024:
        warnings.warn(f"sequence of {n} bits is below the recommended 1024")
    p1, p2 = serial_test(bits, serial_m)
    p_values = {
        "frequency": frequency_test(bits),
        "block_frequency": block_frequency_test(bits, block_frequency_len),
        "runs": runs_test(bits),
        "longest_run": longest_run_test(bits),
        "serial_1": p1,
        "serial_2": p2,
        "approx_entropy": approximate_entropy_test(bits, approx_entropy_m),
        "cumulative_sums": cumulative_sums_test(bits),
    }
    return NistReport(p_values=p_values)
