import math
import random
import struct

import pytest

from regslice.allocator import IndirectionEntry, mask_from_slices, popcount
from regslice.datapath import (RegisterFile, expand_mask, extract_operand,
                               or_merge, stored_float, value_extract,
                               value_truncate, word_to_int)
from regslice.minifloat import FORMATS, FORMATS_BY_BITS, storage_round
from regslice.parser import parse
from regslice.interp import interpret

from oracles import oracle_extract

F16 = FORMATS_BY_BITS[16]


def rand_f32(rng):
    return struct.unpack("<f", struct.pack("<I", rng.getrandbits(32)))[0]


def random_entry(rng, width):
    """Entry with the exact number of slices spread over one or two regs."""
    n = (width + 3) // 4
    slices = rng.sample(range(16), n)
    parts = {}
    for s in sorted(slices):
        parts.setdefault(s // 8, []).append(s % 8)
    regs = sorted(parts)
    if len(regs) == 1:
        return IndirectionEntry(regs[0], mask_from_slices(parts[regs[0]]))
    return IndirectionEntry(regs[0], mask_from_slices(parts[regs[0]]),
                            regs[1], mask_from_slices(parts[regs[1]]))


def test_expand_mask():
    assert expand_mask(0b00000001) == 0x0000000F
    assert expand_mask(0b10000000) == 0xF0000000
    assert expand_mask(0xFF) == 0xFFFFFFFF


def test_split_extract_scenario():
    # 16-bit float split: data slice 0 in r0 slice 7; slices 1..3 in r1
    # slices 2, 3, and 6
    raw_r0 = 0xA << 28
    raw_r1 = (0x3 << 8) | (0xC << 12) | (0x7 << 24)
    p0 = value_extract(raw_r0, 0b10000000, 0, width=16)
    p1 = value_extract(raw_r1, 0b01001100, 1, width=16)
    assert p0 == 0x0000000A          # data slice 0 lands in bits 0..3
    assert p1 == 0x00007C30          # data slices 1..3 land in bits 4..15
    assert or_merge([p0, p1]) == 0x7C3A


def test_identity_extract():
    rng = random.Random(1)
    for _ in range(200):
        raw = rng.getrandbits(32)
        assert value_extract(raw, 0xFF, 0, width=32) == raw


def test_extract_matches_bit_gather_oracle():
    rng = random.Random(77)
    for _ in range(20000):
        width = rng.randint(1, 32)
        total = (width + 3) // 4
        offset = rng.randint(0, total - 1)
        take = rng.randint(1, total - offset)
        mask = mask_from_slices(rng.sample(range(8), take))
        raw = rng.getrandbits(32)
        signed = rng.random() < 0.5
        assert value_extract(raw, mask, offset, signed=signed, width=width) \
            == oracle_extract(raw, mask, offset, signed, width)


def test_split_truncate_scenario():
    e = IndirectionEntry(0, 0b10000000, 1, 0b01001100)
    writes = value_truncate(1.5, e, F16)
    assert [(r, m) for r, m, _ in writes] == [(0, 0b10000000), (1, 0b01001100)]
    for _, mask, word in writes:
        assert word & ~expand_mask(mask) == 0  # nothing outside the mask


def test_full_width_truncate_is_identity():
    e = IndirectionEntry(3, 0xFF)
    writes = value_truncate(0xDEADBEEF, e, None)
    assert writes == [(3, 0xFF, 0xDEADBEEF)]


def test_roundtrip_floats_against_storage_rounding():
    rng = random.Random(9)
    for _ in range(5000):
        fmt = rng.choice(FORMATS)
        x = rand_f32(rng)
        e = random_entry(rng, fmt.total_bits)
        rf = RegisterFile(4, fill=rng.getrandbits(32))
        rf.write_operand(e, x, fmt)
        got = stored_float(rf.read_operand(e, width=fmt.total_bits), fmt)
        want = storage_round(x, fmt)
        assert (struct.pack("<f", got) == struct.pack("<f", want)
                or (math.isnan(got) and math.isnan(want))), (x, fmt, e)


def test_roundtrip_ints():
    rng = random.Random(10)
    for _ in range(5000):
        width = rng.randint(1, 32)
        signed = rng.random() < 0.5
        if signed:
            v = rng.randint(-(1 << (width - 1)), (1 << (width - 1)) - 1)
        else:
            v = rng.randint(0, (1 << width) - 1)
        e = random_entry(rng, width)
        rf = RegisterFile(4, fill=rng.getrandbits(32))
        rf.write_operand(e, v & 0xFFFFFFFF, None, width=width)
        got = word_to_int(rf.read_operand(e, signed=signed, width=width), signed)
        assert got == v, (v, width, signed, e)


def test_coresident_operands_do_not_clobber():
    # two operands share a register; writing one leaves the other intact
    e_lo = IndirectionEntry(0, 0b00001111)
    e_hi = IndirectionEntry(0, 0b11110000)
    rf = RegisterFile(1, fill=0)
    rf.write_operand(e_lo, 0xABCD, None, width=16)
    rf.write_operand(e_hi, 0x1234, None, width=16)
    assert rf.read_operand(e_lo, width=16) == 0xABCD
    assert rf.read_operand(e_hi, width=16) == 0x1234
    rf.write_operand(e_hi, 0x9999, None, width=16)
    assert rf.read_operand(e_lo, width=16) == 0xABCD


def test_simulator_storage_agrees_with_interpreter():
    # the packed datapath and the tuner's storage-rounding semantics agree
    # bit for bit on a one-instruction kernel
    k = parse("""kernel one(a: f32, b: f32) {
    block entry:
      y = add f32 a, b
      return y
    }""")
    rng = random.Random(123)
    for _ in range(500):
        fmt = rng.choice(FORMATS)
        a, b = rng.uniform(-50, 50), rng.uniform(-50, 50)
        out = interpret(k, {"a": a, "b": b}, {"y": fmt}).outputs[0]
        import numpy as np
        exact = float(np.float32(np.float32(a) + np.float32(b)))
        e = random_entry(rng, fmt.total_bits)
        rf = RegisterFile(4, fill=rng.getrandbits(32))
        rf.write_operand(e, exact, fmt)
        got = stored_float(rf.read_operand(e, width=fmt.total_bits), fmt)
        assert struct.pack("<f", float(out)) == struct.pack("<f", got)


def test_truncate_rejects_undersized_entry():
    e = IndirectionEntry(0, 0b00000001)  # one slice
    with pytest.raises(ValueError, match="fewer slices"):
        value_truncate(1.0, e, F16)


def test_extract_rejects_oversized_mask():
    with pytest.raises(ValueError, match="more slices"):
        value_extract(0, 0xFF, 0, width=8)
