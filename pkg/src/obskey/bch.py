"""Binary BCH codes of length 127 over GF(2^7).

Bit blocks are polynomials over GF(2) with bit i as the coefficient of x^i.
The transmitted syndrome is the remainder modulo the generator polynomial
(n - k bits); decoding converts the remainder into power-sum syndromes,
runs Berlekamp-Massey for the error locator, and locates roots by Chien
search.  Decoding declares failure when the locator degree exceeds t or its
root count disagrees with its degree; beyond-capability patterns that land
within distance t of another codeword are miscorrected silently, which no
syndrome decoder can detect.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

_PRIMITIVE_POLY = 0b10001001  # x^7 + x^3 + 1, primitive over GF(2)
_FIELD_BITS = 7
_FIELD_SIZE = 1 << _FIELD_BITS  # 128
CODE_LENGTH = _FIELD_SIZE - 1  # 127

# Discrete log / antilog tables for GF(128).
_EXP = np.zeros(2 * CODE_LENGTH, dtype=np.int32)
_LOG = np.zeros(_FIELD_SIZE, dtype=np.int32)


def _build_tables():
    x = 1
    for i in range(CODE_LENGTH):
        _EXP[i] = x
        _LOG[x] = i
        x <<= 1
        if x & _FIELD_SIZE:
            x ^= _PRIMITIVE_POLY
    _EXP[CODE_LENGTH : 2 * CODE_LENGTH] = _EXP[:CODE_LENGTH]


_build_tables()


def _gf_mul(a, b):
    if a == 0 or b == 0:
        return 0
    return int(_EXP[_LOG[a] + _LOG[b]])


def _gf_inv(a):
    if a == 0:
        raise ZeroDivisionError("inverse of 0 in GF(128)")
    return int(_EXP[CODE_LENGTH - _LOG[a]])


def _poly_mul_gf2(p, q):
    """Multiply polynomials over GF(2), packed as ints (bit i = coeff x^i)."""
    out = 0
    while q:
        if q & 1:
            out ^= p
        q >>= 1
        p <<= 1
    return out


def _minimal_polynomial(element_log):
    """Minimal polynomial over GF(2) of alpha^element_log, packed as an int."""
    # Collect the conjugacy class {e, 2e, 4e, ...} mod 127.
    cls = []
    e = element_log % CODE_LENGTH
    while e not in cls:
        cls.append(e)
        e = (2 * e) % CODE_LENGTH
    # Product of (x - alpha^c): coefficients live in GF(128) but collapse to GF(2).
    poly = [1]  # ascending powers, GF(128) coefficients
    for c in cls:
        root = int(_EXP[c])
        nxt = [0] * (len(poly) + 1)
        for i, coeff in enumerate(poly):
            nxt[i + 1] ^= coeff
            nxt[i] ^= _gf_mul(coeff, root)
        poly = nxt
    packed = 0
    for i, coeff in enumerate(poly):
        if coeff not in (0, 1):
            raise RuntimeError("minimal polynomial has non-binary coefficient")
        packed |= coeff << i
    return packed


def _generator_polynomial(t):
    """lcm of the minimal polynomials of alpha^1 .. alpha^{2t}."""
    seen = set()
    gen = 1
    for j in range(1, 2 * t + 1):
        # One minimal polynomial per conjugacy class.
        e = j % CODE_LENGTH
        cls = frozenset(
            (e * (1 << i)) % CODE_LENGTH for i in range(_FIELD_BITS)
        )
        if cls in seen:
            continue
        seen.add(cls)
        gen = _poly_mul_gf2(gen, _minimal_polynomial(j))
    return gen


@dataclass(frozen=True)
class BchParams:
    n: int
    k: int
    t: int
    generator: int

    @property
    def syndrome_len(self):
        return self.n - self.k


def _make_code(t, expected_k):
    gen = _generator_polynomial(t)
    k = CODE_LENGTH - (gen.bit_length() - 1)
    if k != expected_k:
        raise RuntimeError(f"BCH construction mismatch: t={t} gave k={k}, expected {expected_k}")
    return BchParams(n=CODE_LENGTH, k=k, t=t, generator=gen)


SUPPORTED_CODES = (
    _make_code(2, 113),
    _make_code(4, 99),
    _make_code(7, 78),
    _make_code(10, 64),
)


def _bits_to_int(bits):
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _int_to_bits(value, length):
    raw = value.to_bytes((length + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:length].copy()


def _poly_mod(value, modulus):
    deg_m = modulus.bit_length() - 1
    while value.bit_length() - 1 >= deg_m and value:
        value ^= modulus << (value.bit_length() - 1 - deg_m)
    return value


def encode(message_bits, params):
    """Systematic-free encoding: codeword polynomial = message * generator."""
    message_bits = np.asarray(message_bits, dtype=np.uint8)
    if message_bits.shape != (params.k,):
        raise ParameterError(f"message must have length {params.k}")
    word = _poly_mul_gf2(_bits_to_int(message_bits), params.generator)
    return _int_to_bits(word, params.n)


def syndrome(block_bits, params):
    """Remainder of the block polynomial modulo the generator (n - k bits).

    Zero iff the block is a codeword; linear in the block over GF(2).
    """
    block_bits = np.asarray(block_bits, dtype=np.uint8)
    if block_bits.shape != (params.n,):
        raise ParameterError(f"block must have length {params.n}, got {block_bits.shape}")
    rem = _poly_mod(_bits_to_int(block_bits), params.generator)
    return _int_to_bits(rem, params.syndrome_len)


def _power_sums(remainder_int, params):
    """Evaluate the remainder polynomial at alpha^1 .. alpha^{2t}.

    Since the generator annihilates those points, r mod g and r agree there.
    """
    sums = []
    bit_positions = [i for i in range(params.syndrome_len) if (remainder_int >> i) & 1]
    for j in range(1, 2 * params.t + 1):
        acc = 0
        for pos in bit_positions:
            acc ^= int(_EXP[(pos * j) % CODE_LENGTH])
        sums.append(acc)
    return sums


def _berlekamp_massey(power_sums, t):
    """Error-locator polynomial (ascending GF(128) coefficients)."""
    c = [1] + [0] * (2 * t)
    b = [1] + [0] * (2 * t)
    L, m, bb = 0, 1, 1
    for n_iter in range(2 * t):
        d = power_sums[n_iter]
        for i in range(1, L + 1):
            d ^= _gf_mul(c[i], power_sums[n_iter - i])
        if d == 0:
            m += 1
        elif 2 * L <= n_iter:
            temp = c[:]
            coef = _gf_mul(d, _gf_inv(bb))
            for i in range(2 * t + 1 - m):
                c[i + m] ^= _gf_mul(coef, b[i])
            L = n_iter + 1 - L
            b, bb, m = temp, d, 1
        else:
            coef = _gf_mul(d, _gf_inv(bb))
            for i in range(2 * t + 1 - m):
                c[i + m] ^= _gf_mul(coef, b[i])
            m += 1
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c, L


def _chien_search(locator):
    """Positions i whose alpha^{-i} is a root of the locator."""
    roots = []
    degree = len(locator) - 1
    for i in range(CODE_LENGTH):
        # Evaluate at alpha^{-i} = alpha^{127 - i}.
        x_log = (CODE_LENGTH - i) % CODE_LENGTH
        acc = 0
        for power, coeff in enumerate(locator):
            if coeff:
                acc ^= int(_EXP[(_LOG[coeff] + power * x_log) % CODE_LENGTH])
        if acc == 0:
            roots.append(i)
            if len(roots) == degree:
                break
    return roots


def decode_error_pattern(syndrome_bits, params):
    """Error positions from a syndrome, or None when decoding fails.

    Returns a (possibly empty) list of bit positions when a consistent
    pattern of weight <= t exists for this syndrome.
    """
    syndrome_bits = np.asarray(syndrome_bits, dtype=np.uint8)
    if syndrome_bits.shape != (params.syndrome_len,):
        raise ParameterError(f"syndrome must have length {params.syndrome_len}")
    rem = _bits_to_int(syndrome_bits)
    if rem == 0:
        return []
    sums = _power_sums(rem, params)
    locator, degree = _berlekamp_massey(sums, params.t)
    if degree > params.t or degree != len(locator) - 1:
        return None
    positions = _chien_search(locator)
    if len(positions) != degree:
        return None
    # Consistency check: the pattern must reproduce the syndrome exactly.
    pattern = 0
    for pos in positions:
        pattern |= 1 << pos
    if _poly_mod(pattern, params.generator) != rem:
        return None
    return positions


def correct(block_bits, counterpart_syndrome, params):
    """Align a block with the counterpart that published ``counterpart_syndrome``.

    Returns ``(corrected_block, ok)``; on failure (more than t disagreements
    detected) the original block is returned with ``ok=False`` and the block
    is expected to be discarded by both parties.
    """
    own = syndrome(block_bits, params)
    diff = own ^ np.asarray(counterpart_syndrome, dtype=np.uint8)
    positions = decode_error_pattern(diff, params)
    if positions is None:
        return np.asarray(block_bits, dtype=np.uint8).copy(), False
    corrected = np.asarray(block_bits, dtype=np.uint8).copy()
    for pos in positions:
        corrected[pos] ^= 1
    return corrected, True
