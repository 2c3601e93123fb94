import math
import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regslice.minifloat import (FORMATS, FORMATS_BY_BITS, NarrowFloatBits,
                                canonical_nan, convert_down, convert_up,
                                max_finite, min_normal, storage_round)

from oracles import (enumerate_candidates, oracle_convert_down,
                     oracle_convert_down_enum)

NARROW = [f for f in FORMATS if f.total_bits < 32]


def rand_f32(rng):
    return struct.unpack("<f", struct.pack("<I", rng.getrandbits(32)))[0]


def test_format_table():
    table = {(f.total_bits, f.exponent_bits, f.mantissa_bits) for f in FORMATS}
    assert table == {(32, 8, 23), (28, 7, 20), (24, 6, 17), (20, 5, 14),
                     (16, 5, 10), (12, 4, 7), (8, 3, 4)}
    for f in FORMATS:
        assert 1 + f.exponent_bits + f.mantissa_bits == f.total_bits
        assert f.total_bits % 4 == 0


def test_one_in_half_precision():
    b = convert_down(1.0, FORMATS_BY_BITS[16])
    assert (b.sign, b.exp_field, b.man_field) == (0, 15, 0)
    assert oracle_convert_down(1.0, FORMATS_BY_BITS[16]) == b.raw


@pytest.mark.parametrize("fmt", FORMATS)
def test_infinities_preserved(fmt):
    assert convert_up(convert_down(math.inf, fmt)) == math.inf
    assert convert_up(convert_down(-math.inf, fmt)) == -math.inf


@pytest.mark.parametrize("fmt", NARROW)
def test_below_min_normal_flushes(fmt):
    assert convert_up(convert_down(min_normal(fmt) / 2, fmt)) == 0.0
    b = convert_down(-min_normal(fmt) / 2, fmt)
    assert convert_up(b) == 0.0 and b.sign == 1


@pytest.mark.parametrize("fmt", FORMATS)
def test_source_denormals_flush(fmt):
    tiny = struct.unpack("<f", struct.pack("<I", 1))[0]  # smallest denormal
    assert convert_up(convert_down(tiny, fmt)) == 0.0


@pytest.mark.parametrize("fmt", FORMATS)
def test_nan_canonicalizes(fmt):
    b = convert_down(math.nan, fmt)
    assert b.raw == canonical_nan(fmt).raw
    assert math.isnan(convert_up(b))


def test_one_exact_in_every_format():
    for fmt in FORMATS:
        assert convert_up(convert_down(1.0, fmt)) == 1.0


@pytest.mark.parametrize("bits", [8, 12, 16])
def test_exhaustive_idempotence_and_encoding(bits):
    fmt = FORMATS_BY_BITS[bits]
    for raw in range(1 << bits):
        b = NarrowFloatBits(raw, fmt)
        v = convert_up(b)
        b2 = convert_down(v, fmt)
        v2 = convert_up(b2)
        assert v2 == v or (math.isnan(v) and math.isnan(v2)), raw
        denormal_pattern = b.exp_field == 0 and b.man_field != 0
        if not b.is_nan and not denormal_pattern:
            assert b2.raw == raw  # well-formed encodings round-trip exactly


def test_widening_injective_on_non_nan():
    # +0 and -0 stay distinct because the sign bit survives the widening.
    # Exhaustive for the small formats; the larger ones are sampled.
    rng = random.Random(4)
    for fmt in NARROW:
        exhaustive = fmt.total_bits <= 16
        raws = (range(1 << fmt.total_bits) if exhaustive
                else {rng.getrandbits(fmt.total_bits) for _ in range(40000)})
        seen = set()
        for raw in raws:
            b = NarrowFloatBits(raw, fmt)
            if b.is_nan or (b.exp_field == 0 and b.man_field != 0):
                continue
            key = struct.pack("<f", convert_up(b))
            assert key not in seen, raw
            seen.add(key)


def test_random_against_integer_math_oracle():
    rng = random.Random(101)
    for _ in range(20000):
        x = rand_f32(rng)
        for fmt in NARROW:
            assert convert_down(x, fmt).raw == oracle_convert_down(x, fmt), (x, fmt)


def test_random_against_enumeration_oracle():
    fmt = FORMATS_BY_BITS[8]
    candidates = enumerate_candidates(fmt)
    rng = random.Random(55)
    for _ in range(5000):
        x = rand_f32(rng)
        assert convert_down(x, fmt).raw == oracle_convert_down_enum(
            x, fmt, candidates), x
    # boundary magnitudes around every positive candidate
    for value, _ in candidates:
        if value <= 0:
            continue
        for x in (value * 0.999, value, value * 1.001):
            x32 = struct.unpack("<f", struct.pack("<f", x))[0]
            assert convert_down(x32, fmt).raw == oracle_convert_down_enum(
                x32, fmt, candidates), x32


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=2000, deadline=None)
def test_roundtrip_idempotent(bits):
    x = struct.unpack("<f", struct.pack("<I", bits))[0]
    for fmt in FORMATS:
        once = storage_round(x, fmt)
        twice = storage_round(once, fmt)
        assert once == twice or (math.isnan(once) and math.isnan(twice))


def test_monotone_error_across_formats():
    # wider formats never round farther away, overflow-to-inf excluded
    rng = random.Random(77)
    ordered = sorted(FORMATS, key=lambda f: f.total_bits)
    for _ in range(4000):
        x = rng.uniform(-200.0, 200.0)
        x = struct.unpack("<f", struct.pack("<f", x))[0]
        errors = []
        for fmt in ordered:
            r = storage_round(x, fmt)
            if math.isinf(r):
                errors.append(None)
                continue
            errors.append(abs(x - r))
        finite = [e for e in errors if e is not None]
        assert finite == sorted(finite, reverse=True), (x, errors)


def test_ordering_preserved():
    rng = random.Random(31)
    for fmt in NARROW:
        for _ in range(2000):
            x = rng.uniform(-1e4, 1e4)
            y = x + abs(rng.gauss(0, 10))
            rx, ry = storage_round(x, fmt), storage_round(y, fmt)
            if math.isinf(rx) or math.isinf(ry):
                continue
            assert rx <= ry, (x, y, fmt)


def test_truncate_mode_rounds_toward_zero():
    fmt = FORMATS_BY_BITS[12]
    rng = random.Random(9)
    for _ in range(3000):
        x = rand_f32(rng)
        if not math.isfinite(x):
            continue
        t = storage_round(x, fmt, mode="truncate")
        if math.isinf(t):
            continue
        assert abs(t) <= abs(x)
    with pytest.raises(ValueError):
        convert_down(1.0, fmt, mode="sideways")


def test_max_finite_and_overflow():
    for fmt in NARROW:
        m = max_finite(fmt)
        assert convert_up(convert_down(m, fmt)) == m
        assert convert_up(convert_down(m * 1.25, fmt)) == math.inf
