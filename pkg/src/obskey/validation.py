"""Input validation helpers used by the estimator-style API and the simulator."""

import numbers

import numpy as np

from .errors import ParameterError


def as_rng(seed_or_rng):
    """Return a numpy Generator from a seed, SeedSequence, Generator, or None."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def check_positive_int(value, name, minimum=1):
    if not isinstance(value, numbers.Integral):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_fraction(value, name, low=0.0, high=1.0, inclusive_low=True, inclusive_high=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ParameterError(f"{name} must be a finite number, got {value!r}")
    ok_low = value >= low if inclusive_low else value > low
    ok_high = value <= high if inclusive_high else value < high
    if not (ok_low and ok_high):
        lo = "[" if inclusive_low else "("
        hi = "]" if inclusive_high else ")"
        raise ParameterError(f"{name} must lie in {lo}{low}, {high}{hi}, got {value}")
    return float(value)


def check_csi_matrix(x, name="csi"):
    """Validate an N x K complex CSI matrix (or a length-N vector)."""
    x = np.asarray(x)
    if x.ndim not in (1, 2):
        raise ParameterError(f"{name} must be 1-D or 2-D, got shape {x.shape}")
    if x.size == 0:
        raise ParameterError(f"{name} is empty")
    if not np.all(np.isfinite(x.real)) or not np.all(np.isfinite(np.asarray(x, complex).imag)):
        raise ParameterError(f"{name} contains non-finite entries")
    return np.asarray(x, dtype=complex)


def check_bits(bits, name="bits", min_len=1):
    """Validate and normalize a 0/1 bit sequence to a uint8 array."""
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ParameterError(f"{name} must be one-dimensional")
    if arr.size < min_len:
        raise ParameterError(f"{name} must contain at least {min_len} bits, got {arr.size}")
    arr = arr.astype(np.uint8, casting="unsafe")
    if not np.all((arr == 0) | (arr == 1)):
        raise ParameterError(f"{name} must contain only 0/1 values")
    return arr


def check_pilot(pilot, n):
    """Pilots must be nonzero on every subcarrier (least-squares division)."""
    pilot = np.asarray(pilot, dtype=complex)
    if pilot.shape != (n,):
        raise ParameterError(f"pilot must have shape ({n},), got {pilot.shape}")
    if np.any(np.abs(pilot) == 0):
        raise ParameterError("pilot contains zero entries")
    return pilot
