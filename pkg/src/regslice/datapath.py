"""Bit-level datapath of the packed register file.

value_extract models one thread value extractor: it picks an operand's
slices out of a raw 32-bit register word and realigns them, zeroing unused
positions; the part that holds the operand's top slice also fills every
bit at and above the operand width with the sign (signed integers) or
zeros (unsigned and float). Parts from a split operand OR together into
the complete right-aligned operand.

value_truncate is the inverse: it narrows a float operand to its storage
format, slices the payload, and emits one masked write per physical
register; at writeback only the bit lines selected by the mask are driven,
so co-resident operands are untouched.
"""

from __future__ import annotations

from .allocator import IndirectionEntry, popcount, slices_from_mask
from .minifloat import (FloatFormat, NarrowFloatBits, convert_down, convert_up,
                        float_to_bits32)

WORD_MASK = 0xFFFFFFFF


def expand_mask(mask: int) -> int:
    """8-bit slice mask -> 32-bit bit-line mask."""
    out = 0
    for i in range(8):
        if mask >> i & 1:
            out |= 0xF << (4 * i)
    return out


def value_extract(raw: int, mask: int, slice_offset: int, *,
                  signed: bool = False, width: int = 32) -> int:
    """Extract and realign one part of an operand from a register word.

    `slice_offset` is the number of operand data slices held by earlier
    parts (0 for the first part, popcount(m0) for the second). Set mask
    bits are consumed in ascending slice order and land at data slice
    positions slice_offset, slice_offset+1, ...
    """
    total_slices = (width + 3) // 4
    out = 0
    data_slice = slice_offset
    for phys_slice in slices_from_mask(mask):
        nibble = raw >> (4 * phys_slice) & 0xF
        out |= nibble << (4 * data_slice)
        data_slice += 1
    if data_slice > total_slices:
        raise ValueError("mask selects more slices than the operand width needs")
    # the part holding the top data slice applies the padding policy
    if width < 32 and data_slice == total_slices:
        keep = (1 << width) - 1
        sign_bit = out >> (width - 1) & 1
        out &= keep
        if signed and sign_bit:
            out |= WORD_MASK & ~keep
    return out & WORD_MASK


def or_merge(parts) -> int:
    out = 0
    for p in parts:
        out |= p
    return out & WORD_MASK


def extract_operand(raw_words, entry: IndirectionEntry, *,
                    signed: bool = False, width: int = 32) -> int:
    """Full fetch path: per-part extraction, then the collector's OR-merge."""
    parts = entry.parts()
    if len(raw_words) != len(parts):
        raise ValueError("one raw word per entry part required")
    offset = 0
    merged = []
    for raw, (_, mask) in zip(raw_words, parts):
        merged.append(value_extract(raw, mask, offset, signed=signed, width=width))
        offset += popcount(mask)
    return or_merge(merged)


def value_truncate(operand, entry: IndirectionEntry,
                   fmt: FloatFormat | None = None, *, width: int | None = None,
                   rounding: str = "round") -> list[tuple[int, int, int]]:
    """Writeback path: narrow, slice, and place one operand.

    Returns [(physical register, slice mask, data word), ...] with every
    bit outside the masked slices zero. Float operands pass through
    convert_down first; integers are written as their low `width` bits
    (the stored top slice keeps the value's natural sign extension).
    """
    if fmt is not None:
        if fmt.total_bits == 32:
            bits = float_to_bits32(float(operand))  # stored as-is, no conversion
        else:
            bits = convert_down(float(operand), fmt, rounding).raw
        width = fmt.total_bits
    else:
        if width is None:
            width = 32
        bits = int(operand) & WORD_MASK
    total_slices = (width + 3) // 4
    if entry.slice_count < total_slices:
        raise ValueError("entry has fewer slices than the operand needs")

    writes = []
    data_slice = 0
    for reg, mask in entry.parts():
        word = 0
        for phys_slice in slices_from_mask(mask):
            nibble = bits >> (4 * data_slice) & 0xF
            word |= nibble << (4 * phys_slice)
            data_slice += 1
        writes.append((reg, mask, word))
    return writes


class RegisterFile:
    """One thread lane of the banked register file: 256 x 32-bit words.

    Writes drive only the bit lines named by the slice mask, so slices
    belonging to other operands keep their contents.
    """

    def __init__(self, registers: int = 256, fill: int = 0):
        self.words = [fill & WORD_MASK] * registers

    def read(self, reg: int) -> int:
        return self.words[reg]

    def write_masked(self, reg: int, mask: int, word: int) -> None:
        lines = expand_mask(mask)
        self.words[reg] = (self.words[reg] & ~lines) | (word & lines)

    def write_operand(self, entry: IndirectionEntry, operand,
                      fmt: FloatFormat | None = None, *, width: int | None = None,
                      rounding: str = "round") -> None:
        for reg, mask, word in value_truncate(operand, entry, fmt, width=width,
                                              rounding=rounding):
            self.write_masked(reg, mask, word)

    def read_operand(self, entry: IndirectionEntry, *, signed: bool = False,
                     width: int = 32) -> int:
        raws = [self.read(reg) for reg, _ in entry.parts()]
        return extract_operand(raws, entry, signed=signed, width=width)


def stored_float(rf_value: int, fmt: FloatFormat) -> float:
    """Interpret an extracted word as a narrow float and widen it."""
    return convert_up(NarrowFloatBits(rf_value & ((1 << fmt.total_bits) - 1), fmt))


def int_to_word(v: int) -> int:
    return v & WORD_MASK


def word_to_int(w: int, signed: bool) -> int:
    w &= WORD_MASK
    if signed and w >= 1 << 31:
        w -= 1 << 32
    return w


def float_to_word(x: float) -> int:
    return float_to_bits32(float(x))
