"""Bit-level IEEE 754 binary16 reference, independent of numpy.

Conversions and rounding are done with integer bit manipulation on the
binary64 encoding obtained from ``struct``.  Because every binary16 value
is exact in binary64 and the sum/product of any two binary16 values is
also exact in binary64 (needs at most ~40 significand bits), reference
add/mul are: widen exactly, operate exactly, round once with
round-to-nearest-even.
"""

import math
import struct

F16_EXP_BIAS = 15
F16_MAX_EXP = 15          # unbiased exponent of the top binade
F16_MIN_NORMAL_EXP = -14
F16_QUIET_NAN = 0x7E00


def f64_to_bits(x: float) -> int:
    return struct.unpack(">Q", struct.pack(">d", x))[0]


def _rne_shift(sig: int, k: int) -> int:
    """sig / 2^k rounded to nearest, ties to even, for k >= 0."""
    if k <= 0:
        return sig << (-k)
    q, rem = sig >> k, sig & ((1 << k) - 1)
    half = 1 << (k - 1)
    if rem > half or (rem == half and (q & 1)):
        q += 1
    return q


def round_f64_to_f16_bits(x: float) -> int:
    """Round a binary64 value to binary16 (RNE, overflow to infinity,
    gradual underflow)."""
    bits = f64_to_bits(x)
    sign = (bits >> 63) << 15
    e_raw = (bits >> 52) & 0x7FF
    mant = bits & ((1 << 52) - 1)
    if e_raw == 0x7FF:
        if mant:
            return F16_QUIET_NAN | sign
        return sign | 0x7C00
    if e_raw == 0 and mant == 0:
        return sign
    # Exact value is sig * 2^e with an integer sig.
    if e_raw == 0:
        sig, e = mant, 1 - 1023 - 52
    else:
        sig, e = mant | (1 << 52), e_raw - 1023 - 52
    exp2 = sig.bit_length() - 1 + e  # value in [2^exp2, 2^(exp2+1))
    # Target quantum: 2^(exp2-10) for normals, 2^-24 in the subnormal range.
    t = max(exp2 - 10, F16_MIN_NORMAL_EXP - 10)
    q = _rne_shift(sig, t - e)
    if q == 0:
        return sign
    # Rounding may have bumped the binade (e.g. 2047.9... -> 2048).
    exp2 = q.bit_length() - 1 + t
    if exp2 > F16_MAX_EXP:
        return sign | 0x7C00
    if exp2 < F16_MIN_NORMAL_EXP:
        return sign | q  # subnormal: q < 1024 counts of 2^-24
    # Renormalize q to 11 significand bits: rounding can bump the binade
    # (q == 2^11), making the quantum one step coarser; q stays exact.
    q >>= (exp2 - 10) - t
    return sign | ((exp2 + F16_EXP_BIAS) << 10) | (q - 1024)


def f16_bits_to_f64(bits: int) -> float:
    """Exact widening of a binary16 pattern."""
    sign = -1.0 if bits & 0x8000 else 1.0
    e = (bits >> 10) & 0x1F
    m = bits & 0x3FF
    if e == 0x1F:
        return sign * math.inf if m == 0 else math.nan
    if e == 0:
        return sign * m * 2.0 ** -24
    return sign * (m + 1024) * 2.0 ** (e - F16_EXP_BIAS - 10)


def ref_from_f32(x: float) -> int:
    """binary32 value (exact in the Python float) -> binary16 bits."""
    return round_f64_to_f16_bits(x)


def ref_add(a_bits: int, b_bits: int) -> int:
    return round_f64_to_f16_bits(f16_bits_to_f64(a_bits) + f16_bits_to_f64(b_bits))


def ref_mul(a_bits: int, b_bits: int) -> int:
    return round_f64_to_f16_bits(f16_bits_to_f64(a_bits) * f16_bits_to_f64(b_bits))


def is_nan_bits(bits: int) -> bool:
    return (bits & 0x7C00) == 0x7C00 and (bits & 0x03FF) != 0
