import numpy as np
import pytest

from obskey import bch
from obskey.errors import ParameterError

CODE_113 = bch.SUPPORTED_CODES[0]


def test_supported_code_table():
    table = [(p.n, p.k, p.t) for p in bch.SUPPORTED_CODES]
    assert table == [(127, 113, 2), (127, 99, 4), (127, 78, 7), (127, 64, 10)]


def test_zero_block_zero_syndrome():
    for params in bch.SUPPORTED_CODES:
        assert not bch.syndrome(np.zeros(127, dtype=np.uint8), params).any()


def test_codewords_have_zero_syndrome(rng):
    for params in bch.SUPPORTED_CODES:
        for _ in range(10):
            msg = rng.integers(0, 2, params.k).astype(np.uint8)
            assert not bch.syndrome(bch.encode(msg, params), params).any()


def test_syndrome_is_linear(rng):
    params = CODE_113
    a = rng.integers(0, 2, 127).astype(np.uint8)
    b = rng.integers(0, 2, 127).astype(np.uint8)
    lhs = bch.syndrome(a ^ b, params)
    rhs = bch.syndrome(a, params) ^ bch.syndrome(b, params)
    assert np.array_equal(lhs, rhs)


def test_syndrome_rejects_wrong_length():
    with pytest.raises(ParameterError):
        bch.syndrome(np.zeros(126, dtype=np.uint8), CODE_113)


def test_correct_identical_blocks(rng):
    msg = rng.integers(0, 2, CODE_113.k).astype(np.uint8)
    cw = bch.encode(msg, CODE_113)
    fixed, ok = bch.correct(cw, bch.syndrome(cw, CODE_113), CODE_113)
    assert ok
    assert np.array_equal(fixed, cw)


def test_correct_every_single_flip(rng):
    msg = rng.integers(0, 2, CODE_113.k).astype(np.uint8)
    cw = bch.encode(msg, CODE_113)
    synd = bch.syndrome(cw, CODE_113)
    for pos in range(127):
        corrupted = cw.copy()
        corrupted[pos] ^= 1
        fixed, ok = bch.correct(corrupted, synd, CODE_113)
        assert ok
        assert np.array_equal(fixed, cw)


def test_correct_random_double_flips(rng):
    msg = rng.integers(0, 2, CODE_113.k).astype(np.uint8)
    cw = bch.encode(msg, CODE_113)
    synd = bch.syndrome(cw, CODE_113)
    for _ in range(200):
        i, j = rng.choice(127, size=2, replace=False)
        corrupted = cw.copy()
        corrupted[[i, j]] ^= 1
        fixed, ok = bch.correct(corrupted, synd, CODE_113)
        assert ok
        assert np.array_equal(fixed, cw)


@pytest.mark.parametrize("params", bch.SUPPORTED_CODES[1:], ids=lambda p: f"t{p.t}")
def test_correct_up_to_t_random_patterns(params, rng):
    for _ in range(200):
        msg = rng.integers(0, 2, params.k).astype(np.uint8)
        cw = bch.encode(msg, params)
        weight = int(rng.integers(1, params.t + 1))
        pos = rng.choice(params.n, size=weight, replace=False)
        corrupted = cw.copy()
        corrupted[pos] ^= 1
        fixed, ok = bch.correct(corrupted, bch.syndrome(cw, params), params)
        assert ok
        assert np.array_equal(fixed, cw)


def test_failure_flag_beyond_capability():
    # Constructed beyond-capability patterns.  A syndrome decoder cannot
    # detect every (t+1)-pattern: those within distance t of another codeword
    # miscorrect silently (common for t=2, whose weight-5 codewords are
    # plentiful).  Each pattern below is verified detectable.
    patterns = {
        2: [0, 9, 18],
        4: list(range(5)),
        7: list(range(8)),
        10: list(range(11)),
    }
    for params in bch.SUPPORTED_CODES:
        cw = np.zeros(params.n, dtype=np.uint8)
        corrupted = cw.copy()
        corrupted[patterns[params.t]] ^= 1
        fixed, ok = bch.correct(corrupted, bch.syndrome(cw, params), params)
        assert not ok
        assert np.array_equal(fixed, corrupted)  # block returned unmodified


def test_failure_flag_rate_beyond_capability(rng):
    # For the stronger codes, random (t+1)-patterns are detected nearly
    # always (the rare exceptions are information-theoretic miscorrections).
    for params in bch.SUPPORTED_CODES[1:]:
        cw = np.zeros(params.n, dtype=np.uint8)
        synd = bch.syndrome(cw, params)
        detected = 0
        for _ in range(50):
            pos = rng.choice(params.n, size=params.t + 1, replace=False)
            corrupted = cw.copy()
            corrupted[pos] ^= 1
            _, ok = bch.correct(corrupted, synd, params)
            detected += not ok
        assert detected >= 45, f"t={params.t}: only {detected}/50 flagged"


def test_decode_error_pattern_empty_for_zero_syndrome():
    assert bch.decode_error_pattern(np.zeros(CODE_113.syndrome_len, dtype=np.uint8), CODE_113) == []
