"""Deterministic single-precision operations for the mixing rounds.

Only IEEE-754 basic operations (``+ - * /``, ``fmod`` and ``ldexp``, all
exactly specified) are used; transcendental functions are fixed polynomials
evaluated in a fixed order, so results never depend on the platform libm.

Operands and results go through canonicalisation:

* inputs: subnormals and -0 become +0
* outputs: NaN -> 0x7FC00000, +/-Inf -> +/-FLT_MAX, -0 and subnormals -> +0
"""
from __future__ import annotations

import math

import numpy as np

from .rng import Pcg32

CANONICAL_NAN = 0x7FC0_0000
FLT_MAX_BITS = 0x7F7F_FFFF
NEG_FLT_MAX_BITS = 0xFF7F_FFFF

FP_OPS = ("fadd", "fmul", "fdiv", "fsin", "fcos", "ftanh")

_f = np.float32


def _bits(w: int) -> np.float32:
    return np.array([w], dtype=np.uint32).view(np.float32)[0]


TWO_PI = _f(2 * math.pi)
TWO_OVER_PI = _f(2 / math.pi)
# pi/2 split so that k * PIO2_HI is exact for |k| <= 4
PIO2_HI = _bits(0x3FC9_0000)
PIO2_MID = _bits(0x39FD_AA22)
PIO2_LO = _bits(0x2C34_6000)
INV_LN2 = _bits(0x3FB8_AA3B)
LN2_HI = _bits(0x3F31_7200)
LN2_LO = _bits(0x35BF_BE8E)

# Horner coefficients, highest order first
SIN_C = tuple(_f(c) for c in (1 / 362880, -1 / 5040, 1 / 120, -1 / 6))
COS_C = tuple(_f(c) for c in (-1 / 3628800, 1 / 40320, -1 / 720, 1 / 24, -1 / 2))
TANH_C = tuple(_f(c) for c in (
    -929569 / 638512875, 21844 / 6081075, -1382 / 155925,
    62 / 2835, -17 / 315, 2 / 15, -1 / 3,
))
EXP_C = tuple(_f(c) for c in (1 / 5040, 1 / 720, 1 / 120, 1 / 24, 1 / 6, 1 / 2, 1.0, 1.0))

_ONE = _f(1.0)
_TWO = _f(2.0)
_HALF = _f(0.5)
_NINE = _f(9.0)


def canonical_in(words: np.ndarray) -> np.ndarray:
    w = np.asarray(words, dtype=np.uint32)
    w = np.where((w >> np.uint32(23)) & np.uint32(0xFF) == 0, np.uint32(0), w)
    return w.view(np.float32)


def canonical_out(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float32)
    w = x.view(np.uint32).copy()
    w[(w >> np.uint32(23)) & np.uint32(0xFF) == 0] = 0
    w[np.isnan(x)] = CANONICAL_NAN
    w[x == np.inf] = FLT_MAX_BITS
    w[x == -np.inf] = NEG_FLT_MAX_BITS
    return w


def _horner(z: np.ndarray, coeffs) -> np.ndarray:
    acc = np.full_like(z, coeffs[0])
    for c in coeffs[1:]:
        acc = acc * z + c
    return acc


def _sin_kernel(y):
    z = y * y
    return y + (y * z) * _horner(z, SIN_C)


def _cos_kernel(y):
    z = y * y
    return _ONE + z * _horner(z, COS_C)


def _reduce(x):
    r = np.fmod(x, TWO_PI)
    k = np.rint(r * TWO_OVER_PI)
    y = r - k * PIO2_HI
    y = y - k * PIO2_MID
    y = y - k * PIO2_LO
    q = np.nan_to_num(k).astype(np.int64) & 3
    return q, y


def sin32(x: np.ndarray) -> np.ndarray:
    q, y = _reduce(x)
    s, c = _sin_kernel(y), _cos_kernel(y)
    return np.select([q == 0, q == 1, q == 2], [s, c, -s], -c)


def cos32(x: np.ndarray) -> np.ndarray:
    q, y = _reduce(x)
    s, c = _sin_kernel(y), _cos_kernel(y)
    return np.select([q == 0, q == 1, q == 2], [c, -s, -c], s)


def _exp_mid(y):
    # valid for 1 <= y <= 18, the range tanh needs
    k = np.rint(y * INV_LN2)
    r = y - k * LN2_HI
    r = r - k * LN2_LO
    ki = np.nan_to_num(k).astype(np.int32)
    return np.ldexp(_horner(r, EXP_C), ki).astype(np.float32)


def tanh32(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    z = x * x
    small = x + (x * z) * _horner(z, TANH_C)
    e = _exp_mid(ax + ax)
    mid = np.copysign(_ONE - _TWO / (e + _ONE), x)
    out = np.where(ax < _HALF, small, mid)
    return np.where(ax >= _NINE, np.copysign(_ONE, x), out)


def fp32_apply_array(op: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Apply one FP32 op element-wise to uint32 bit patterns; returns uint32."""
    with np.errstate(all="ignore"):
        x = canonical_in(a)
        if op == "fadd":
            r = x + canonical_in(b)
        elif op == "fmul":
            r = x * canonical_in(b)
        elif op == "fdiv":
            r = x / canonical_in(b)
        elif op == "fsin":
            r = sin32(x)
        elif op == "fcos":
            r = cos32(x)
        elif op == "ftanh":
            r = tanh32(x)
        else:
            raise ValueError(f"unknown FP32 op {op!r}")
        return canonical_out(r)


def fp32_apply(op: str, a: int, b: int = 0) -> int:
    """Scalar convenience wrapper around :func:`fp32_apply_array`."""
    out = fp32_apply_array(op, np.array([a], dtype=np.uint32), np.array([b], dtype=np.uint32))
    return int(out[0])


SPECIAL_PATTERNS = (
    0x0000_0000, 0x8000_0000, 0x0000_0001, 0x807F_FFFF, 0x7F80_0000, 0xFF80_0000,
    0x7FC0_0000, 0xFFFF_FFFF, 0x7F7F_FFFF, 0x3F80_0000, 0xBF80_0000, 0x3F00_0000,
    0x4049_0FDB, 0x3FC9_0FDB, 0x4110_0000, 0x4B80_0000,
)


def golden_inputs(op: str, count: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic operand pairs for the FP32 golden-vector suite.

    Half raw 32-bit patterns, three eighths values in [-64, 64), the rest
    special patterns (zeros, subnormals, infinities, NaN, extremes).
    """
    rng = Pcg32(0x4650_3332, FP_OPS.index(op))
    n_raw, n_mid = count // 2, count * 3 // 8
    raw = [rng() for _ in range(2 * n_raw)]
    mid = ((np.array([rng() for _ in range(2 * n_mid)], dtype=np.float64) / 2.0**32) * 128 - 64)
    mid_bits = mid.astype(np.float32).view(np.uint32).tolist()
    n_special = count - n_raw - n_mid
    sp = [SPECIAL_PATTERNS[(i + rng() % 3) % len(SPECIAL_PATTERNS)] for i in range(2 * n_special)]
    words = np.array(raw + mid_bits + sp, dtype=np.uint32)
    return words[0::2].copy(), words[1::2].copy()
