"""Reduced-precision floating-point formats and one-step conversions.

Seven formats are supported, every one a multiple of four bits wide so a
value occupies whole register slices:

    total    32  28  24  20  16  12   8
    exponent  8   7   6   5   5   4   3
    mantissa 23  20  17  14  10   7   4

plus one sign bit each. The formats mimic IEEE 754: exponent bias is
2^(e-1)-1, all-ones exponent encodes infinities and NaN. Denormals do not
exist in the narrow formats: an input whose magnitude lies below the
format's smallest normal flushes to (signed) zero, as do 32-bit denormal
inputs. NaN encodings canonicalize to a single quiet NaN per format
(all-ones exponent, mantissa MSB set, sign 0); payloads are not preserved.

convert_down rounds to nearest, ties to even, by default. Conversion up to
32 bits is exact for every format.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass


@dataclass(frozen=True)
class FloatFormat:
    total_bits: int
    exponent_bits: int
    mantissa_bits: int

    def __post_init__(self):
        assert 1 + self.exponent_bits + self.mantissa_bits == self.total_bits
        assert self.total_bits % 4 == 0

    @property
    def bias(self) -> int:
        return (1 << (self.exponent_bits - 1)) - 1

    @property
    def emax(self) -> int:
        return (1 << self.exponent_bits) - 2 - self.bias  # all-ones is Inf/NaN

    @property
    def emin(self) -> int:
        return 1 - self.bias

    @property
    def exp_mask(self) -> int:
        return (1 << self.exponent_bits) - 1

    @property
    def man_mask(self) -> int:
        return (1 << self.mantissa_bits) - 1

    def __repr__(self) -> str:
        return f"f{self.total_bits}e{self.exponent_bits}m{self.mantissa_bits}"


FORMATS = (
    FloatFormat(32, 8, 23),
    FloatFormat(28, 7, 20),
    FloatFormat(24, 6, 17),
    FloatFormat(20, 5, 14),
    FloatFormat(16, 5, 10),
    FloatFormat(12, 4, 7),
    FloatFormat(8, 3, 4),
)
FORMATS_BY_BITS = {f.total_bits: f for f in FORMATS}
F32_FORMAT = FORMATS_BY_BITS[32]
NARROWEST_FIRST = tuple(sorted(FORMATS, key=lambda f: f.total_bits))


@dataclass(frozen=True)
class NarrowFloatBits:
    raw: int
    fmt: FloatFormat

    def __post_init__(self):
        assert 0 <= self.raw < (1 << self.fmt.total_bits)

    @property
    def sign(self) -> int:
        return (self.raw >> (self.fmt.total_bits - 1)) & 1

    @property
    def exp_field(self) -> int:
        return (self.raw >> self.fmt.mantissa_bits) & self.fmt.exp_mask

    @property
    def man_field(self) -> int:
        return self.raw & self.fmt.man_mask

    @property
    def is_nan(self) -> bool:
        return self.exp_field == self.fmt.exp_mask and self.man_field != 0

    @property
    def is_inf(self) -> bool:
        return self.exp_field == self.fmt.exp_mask and self.man_field == 0

    @property
    def is_zero(self) -> bool:
        # denormal encodings read back as zero; they are never produced
        return self.exp_field == 0


def _pack(fmt: FloatFormat, sign: int, exp_field: int, man_field: int) -> NarrowFloatBits:
    raw = (sign << (fmt.total_bits - 1)) | (exp_field << fmt.mantissa_bits) | man_field
    return NarrowFloatBits(raw, fmt)


def canonical_nan(fmt: FloatFormat) -> NarrowFloatBits:
    return _pack(fmt, 0, fmt.exp_mask, 1 << (fmt.mantissa_bits - 1))


def infinity(fmt: FloatFormat, sign: int) -> NarrowFloatBits:
    return _pack(fmt, sign, fmt.exp_mask, 0)


def zero(fmt: FloatFormat, sign: int) -> NarrowFloatBits:
    return _pack(fmt, sign, 0, 0)


def float_to_bits32(x: float) -> int:
    return struct.unpack("<I", struct.pack("<f", x))[0]


def bits32_to_float(b: int) -> float:
    return struct.unpack("<f", struct.pack("<I", b))[0]


def convert_down(x: float, fmt: FloatFormat,
                 mode: str = "round") -> NarrowFloatBits:
    """Encode a 32-bit float value in the given format.

    `mode` selects mantissa handling: "round" (nearest-even, the default
    used everywhere in the pipeline) or "truncate" (toward zero), kept as a
    switch for sensitivity experiments. Denormal inputs and results below
    the smallest normal flush to signed zero; overflow gives infinity.
    """
    if mode not in ("round", "truncate"):
        raise ValueError(f"unknown rounding mode {mode!r}")
    b32 = float_to_bits32(x)
    sign = b32 >> 31
    exp32 = (b32 >> 23) & 0xFF
    man32 = b32 & 0x7FFFFF

    if exp32 == 0xFF:
        if man32:
            return canonical_nan(fmt)
        return infinity(fmt, sign)
    if exp32 == 0:
        return zero(fmt, sign)  # zero or a 32-bit denormal: flush

    e = exp32 - 127                 # unbiased exponent, value = 1.man * 2^e
    if e < fmt.emin:
        return zero(fmt, sign)      # below the smallest normal: flush
    sig = (1 << 23) | man32         # 24-bit significand
    drop = 23 - fmt.mantissa_bits
    if drop:
        keep = sig >> drop
        if mode == "round":
            rem = sig & ((1 << drop) - 1)
            half = 1 << (drop - 1)
            if rem > half or (rem == half and (keep & 1)):
                keep += 1
                if keep >> (fmt.mantissa_bits + 1):
                    keep >>= 1
                    e += 1
    else:
        keep = sig

    if e > fmt.emax:
        return infinity(fmt, sign)
    return _pack(fmt, sign, e + fmt.bias, keep & fmt.man_mask)


def convert_up(b: NarrowFloatBits) -> float:
    """Decode to the exact 32-bit float value (lossless for every format)."""
    fmt = b.fmt
    if fmt.total_bits == 32:
        return bits32_to_float(b.raw)
    if b.is_nan:
        return math.nan
    if b.is_inf:
        return math.inf if b.sign == 0 else -math.inf
    if b.exp_field == 0:
        return -0.0 if b.sign else 0.0
    e = b.exp_field - fmt.bias
    sig = (1 << fmt.mantissa_bits) | b.man_field
    exp32 = e + 127
    man32 = sig << (23 - fmt.mantissa_bits)
    b32 = (b.sign << 31) | (exp32 << 23) | (man32 & 0x7FFFFF)
    return bits32_to_float(b32)


def storage_round(x: float, fmt: FloatFormat, mode: str = "round") -> float:
    """Value after a round trip through the format: what the register holds."""
    if fmt.total_bits == 32:
        return bits32_to_float(float_to_bits32(x))
    return convert_up(convert_down(x, fmt, mode))


def min_normal(fmt: FloatFormat) -> float:
    return math.ldexp(1.0, fmt.emin)


def max_finite(fmt: FloatFormat) -> float:
    return math.ldexp(2.0 - math.ldexp(1.0, -fmt.mantissa_bits), fmt.emax)
