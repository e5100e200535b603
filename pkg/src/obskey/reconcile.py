"""Syndrome-based reconciliation, leakage accounting, and key distillation.

The responder blocks its raw key, publishes one syndrome per block (plus the
zero-pad length of the final block), and the initiator corrects its own
blocks against those syndromes.  Blocks whose disagreement exceeds the code
capability are flagged and discarded symmetrically; the discard list is
public.  The surviving bits are hashed to a 128-bit key, after checking the
leakage-compensated minimum length.
"""

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from . import bch
from .errors import KeyTooShortError, ParameterError, ReconciliationInfeasibleError
from .validation import check_bits

FINAL_KEY_BITS = 128
# Safety margin applied to the estimated mismatch rate when sizing t.
CODE_SELECTION_MARGIN = 2.5

DIGESTS = {
    "md5": lambda data: hashlib.md5(data).digest(),
    "blake2s128": lambda data: hashlib.blake2s(data, digest_size=16).digest(),
}


@dataclass
class LeakageBudget:
    eta1: float
    eta2: float
    raw_len: int
    syndrome_len: int
    required_len: int


@dataclass
class ReconciliationResult:
    bits_alice: np.ndarray
    bits_bob: np.ndarray
    params: bch.BchParams
    n_blocks: int
    pad_len: int
    discarded_blocks: list
    syndromes: np.ndarray  # (n_blocks, n - k) responder syndromes
    leakage: LeakageBudget = field(default=None)


def select_code(estimated_bmr):
    """Smallest-redundancy supported code able to correct the estimated
    mismatch rate with a safety margin of 2.5."""
    if not 0.0 <= estimated_bmr <= 1.0 or not math.isfinite(estimated_bmr):
        raise ParameterError(f"estimated_bmr must lie in [0, 1], got {estimated_bmr}")
    needed_t = math.ceil(CODE_SELECTION_MARGIN * estimated_bmr * bch.CODE_LENGTH)
    for params in bch.SUPPORTED_CODES:
        if params.t >= needed_t:
            return params
    raise ReconciliationInfeasibleError(
        estimated_bmr,
        f"mismatch rate {estimated_bmr:.4f} needs t >= {needed_t}; "
        f"largest supported t is {bch.SUPPORTED_CODES[-1].t}",
    )


def leakage(raw_len, syndrome_len, eta1):
    """Leakage budget: eta2 = emitted syndrome bits / raw bits, and the
    minimum raw length that still leaves 128 secret bits."""
    if syndrome_len < 0:
        raise ParameterError("syndrome_len must be non-negative")
    if raw_len <= syndrome_len:
        raise ParameterError(
            f"raw length {raw_len} must exceed syndrome length {syndrome_len}"
        )
    eta2 = syndrome_len / raw_len
    required = math.ceil(FINAL_KEY_BITS / ((1.0 - eta1) * (1.0 - eta2)))
    return LeakageBudget(
        eta1=eta1,
        eta2=eta2,
        raw_len=raw_len,
        syndrome_len=syndrome_len,
        required_len=required,
    )


def _block_views(bits, params):
    """Zero-pad to a whole number of blocks; the pad length is public."""
    n_blocks = math.ceil(len(bits) / params.n)
    pad_len = n_blocks * params.n - len(bits)
    padded = np.concatenate([bits, np.zeros(pad_len, dtype=np.uint8)])
    return padded.reshape(n_blocks, params.n), pad_len


def compute_syndromes(bits, params):
    """Responder side: per-block syndromes plus the public pad length."""
    bits = check_bits(bits, "raw key")
    blocks, pad_len = _block_views(bits, params)
    syndromes = np.stack([bch.syndrome(block, params) for block in blocks])
    return syndromes, pad_len


def reconcile(bits_alice, bits_bob, params, eta1=0.0):
    """Full reconciliation: Bob publishes syndromes, Alice corrects, failed
    blocks are discarded on both sides.

    The leakage accounting counts the actually emitted syndrome bits (all
    blocks emit, including later-discarded ones) plus the pad length.
    """
    bits_alice = check_bits(bits_alice, "alice raw key")
    bits_bob = check_bits(bits_bob, "bob raw key")
    if len(bits_alice) != len(bits_bob):
        raise ParameterError("raw keys must have equal length after mask intersection")

    syndromes, pad_len = compute_syndromes(bits_bob, params)
    blocks_a, _ = _block_views(bits_alice, params)
    blocks_b, _ = _block_views(bits_bob, params)

    kept_a, kept_b, discarded = [], [], []
    for idx, (block, synd) in enumerate(zip(blocks_a, syndromes)):
        corrected, ok = bch.correct(block, synd, params)
        if ok:
            kept_a.append(corrected)
            kept_b.append(blocks_b[idx])
        else:
            discarded.append(idx)

    out_a = np.concatenate(kept_a) if kept_a else np.zeros(0, dtype=np.uint8)
    out_b = np.concatenate(kept_b) if kept_b else np.zeros(0, dtype=np.uint8)
    # Strip the zero pad from the final block when it survived.
    if pad_len and kept_a and (len(blocks_a) - 1) not in discarded:
        out_a = out_a[:-pad_len]
        out_b = out_b[:-pad_len]

    syndrome_bits = syndromes.size + pad_len  # pad announcement counted conservatively
    budget = leakage(len(bits_bob), syndrome_bits, eta1)
    return ReconciliationResult(
        bits_alice=out_a,
        bits_bob=out_b,
        params=params,
        n_blocks=len(blocks_a),
        pad_len=pad_len,
        discarded_blocks=discarded,
        syndromes=syndromes,
        leakage=budget,
    )


def privacy_amplify(reconciled_bits, required_len, digest="md5"):
    """Hash the reconciled bit string down to a 128-bit key.

    The hashed message is a one-byte pad length header followed by the bits
    packed big-endian (MSB first within each byte, zero-padded at the end).
    """
    reconciled_bits = check_bits(reconciled_bits, "reconciled key")
    if digest not in DIGESTS:
        raise ParameterError(f"unknown digest {digest!r}; supported: {sorted(DIGESTS)}")
    if len(reconciled_bits) < required_len:
        raise KeyTooShortError(len(reconciled_bits), required_len)
    pad = (-len(reconciled_bits)) % 8
    padded = np.concatenate([reconciled_bits, np.zeros(pad, dtype=np.uint8)])
    payload = bytes([pad]) + np.packbits(padded).tobytes()
    key = DIGESTS[digest](payload)
    assert len(key) * 8 == FINAL_KEY_BITS
    return key
