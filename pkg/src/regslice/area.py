"""Transistor-count area model for the added register-file structures.

Counts build up from per-bit gate estimates: a 9:1 multiplexer bit costs
eight 6-transistor AOI cells, a thread value extractor is eight such
muxes 32 bits wide plus a 4-bit 2:1 mux, a thread value converter is
about 1300 transistors (adder plus muxes at the register-transfer level),
indirection tables are 6-transistor SRAM cells, and a thread value
truncator combines one converter-sized unit with two extractor stages.
Per-warp and chip totals follow the model's rounding convention: the
exact per-warp extractor count (49,920) books as 50K, so sixteen of them
total 800K.
"""

from __future__ import annotations

from dataclasses import dataclass

AOI_TRANSISTORS = 6
MUX9_BIT = 8 * AOI_TRANSISTORS            # one 9:1 mux bit
TVE_MUX_TRANSISTORS = 8 * 32 * AOI_TRANSISTORS  # eight 9:1 muxes, 32 bits wide
TVE_PAD_MUX = 4 * AOI_TRANSISTORS         # 4-bit 2:1 mux for zero/one padding
TVE_TRANSISTORS = TVE_MUX_TRANSISTORS + TVE_PAD_MUX            # 1560
WARP_EXTRACTOR_EXACT = 32 * TVE_TRANSISTORS                    # 49,920
WARP_EXTRACTOR_ROUNDED = 50_000

TVC_TRANSISTORS = 1300                    # thread value converter (synthesized)
TRUNCATOR_EXTRACTOR_STAGE = 2048          # extractor stage inside a truncator
TVT_TRANSISTORS = TVC_TRANSISTORS + 2 * TRUNCATOR_EXTRACTOR_STAGE  # 5396

SRAM_BIT = 6
TABLE_ENTRIES = 256
TABLE_ENTRY_BITS = 32

CU_OR_GATE_BITS = 1024
CU_EXTRA_STORAGE_BITS = 35


@dataclass(frozen=True)
class AreaModel:
    architecture: str
    parts: dict[str, int]            # per processing block
    per_block_total: int             # exact sum of parts
    blocks_per_sm: int
    sm_count: int
    per_sm_total: int                # exact
    chip_total: int                  # exact
    per_block_reported: int          # rounded reporting chain
    per_sm_reported: int
    chip_reported: int

    def as_dict(self) -> dict:
        return {
            "architecture": self.architecture,
            "parts": dict(self.parts),
            "per_block_total": self.per_block_total,
            "blocks_per_sm": self.blocks_per_sm,
            "sm_count": self.sm_count,
            "per_sm_total": self.per_sm_total,
            "chip_total": self.chip_total,
            "per_block_reported": self.per_block_reported,
            "per_sm_reported": self.per_sm_reported,
            "chip_reported": self.chip_reported,
        }


def _parts(extractor_count: int, converters: int = 6, truncators: int = 3,
           collector_units: int = 16) -> dict[str, int]:
    return {
        "value_extractors": extractor_count * WARP_EXTRACTOR_ROUNDED,
        "value_converters": converters * 32 * TVC_TRANSISTORS,
        "indirection_tables": 2 * TABLE_ENTRIES * TABLE_ENTRY_BITS * SRAM_BIT,
        "value_truncators": truncators * 32 * TVT_TRANSISTORS,
        "collector_unit_extension": collector_units * (
            CU_OR_GATE_BITS * AOI_TRANSISTORS
            + CU_EXTRA_STORAGE_BITS * 3 * AOI_TRANSISTORS),
    }


def area_estimate(architecture: str, sm_count: int | None = None) -> AreaModel:
    """Per-structure transistor counts and totals for the architecture.

    fermi: one register file per SM (16 bank extractors), 15 SMs.
    volta: four processing blocks per SM, each with its own register file
    needing half the extractors; 84 SMs. Reported Volta totals follow the
    rounding convention 1.4M per block -> 5.6M per SM.
    """
    arch = architecture.lower()
    if arch == "fermi":
        sms = 15 if sm_count is None else sm_count
        parts = _parts(extractor_count=16)
        per_block = sum(parts.values())
        return AreaModel("fermi", parts, per_block, 1, sms, per_block,
                         per_block * sms, per_block, per_block,
                         per_block * sms)
    if arch == "volta":
        sms = 84 if sm_count is None else sm_count
        parts = _parts(extractor_count=8)
        per_block = sum(parts.values())
        per_block_reported = 1_400_000
        per_sm_reported = per_block_reported * 4
        return AreaModel("volta", parts, per_block, 4, sms, per_block * 4,
                         per_block * 4 * sms, per_block_reported,
                         per_sm_reported, per_sm_reported * sms)
    raise ValueError(f"unknown architecture {architecture!r}")
