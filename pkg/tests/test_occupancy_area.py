import pytest

from regslice.area import area_estimate
from regslice.occupancy import Machine, occupancy


def test_occupancy_reference_points():
    r = occupancy(52, 10, 0)
    assert (r.blocks, r.active_warps) == (1, 10)
    assert r.occupancy_percent == pytest.approx(100 * 10 / 48)
    assert r.rounded_percent == 21
    assert r.limiter == "registers"

    r = occupancy(29, 10, 0)
    assert (r.blocks, r.active_warps, r.occupancy_percent) == (3, 30, 62.5)
    assert r.limiter == "registers"


def test_shared_memory_limited_case():
    r = occupancy(24, 10, 14560)
    assert r.blocks == 3
    assert r.limiter == "shared-mem"
    # without the shared memory the register file would fit four blocks
    assert occupancy(24, 10, 0).blocks == 4


def test_max_warps_cap():
    r = occupancy(1, 8, 0)
    assert (r.blocks, r.active_warps) == (6, 48)
    assert r.occupancy_percent == 100.0
    assert r.limiter == "max-warps"


def test_unlaunchable_kernel_reports_zero_blocks():
    r = occupancy(200, 10, 0)  # 200*32*10 = 64000 > 32768
    assert r.blocks == 0 and r.active_warps == 0
    assert r.occupancy_percent == 0.0
    assert r.limiter == "registers"


def test_occupancy_monotone():
    for wpb in (2, 6, 10):
        prev = None
        for regs in range(1, 120, 3):
            pct = occupancy(regs, wpb, 0).occupancy_percent
            if prev is not None:
                assert pct <= prev
            prev = pct
    prev = None
    for shmem in range(0, 49152, 4096):
        pct = occupancy(16, 8, shmem).occupancy_percent
        if prev is not None:
            assert pct <= prev
        prev = pct


def test_occupancy_input_validation():
    with pytest.raises(ValueError):
        occupancy(0, 10, 0)
    with pytest.raises(ValueError):
        occupancy(10, 60, 0)
    with pytest.raises(ValueError):
        occupancy(10, 10, -5)


def test_occupancy_display():
    assert occupancy(29, 10, 0).display() == "62.5% (~63%)"
    assert occupancy(1, 8, 0).display() == "100%"


def test_fermi_area_breakdown():
    m = area_estimate("fermi")
    assert m.parts == {
        "value_extractors": 800_000,
        "value_converters": 249_600,
        "indirection_tables": 98_304,
        "value_truncators": 518_016,
        "collector_unit_extension": 108_384,
    }
    assert m.per_sm_total == 1_774_304
    assert m.per_sm_total == sum(m.parts.values())
    assert m.chip_total == 1_774_304 * 15 == 26_614_560


def test_volta_area_chain():
    m = area_estimate("volta")
    assert m.per_block_total == 1_374_304
    assert m.per_block_total == sum(m.parts.values())
    assert m.parts["value_extractors"] == 400_000
    assert m.per_sm_reported == 5_600_000
    assert abs(m.chip_reported - 470_000_000) / 470_000_000 < 0.01
    assert m.per_sm_total == 4 * m.per_block_total


def test_zero_sm_chip_total():
    assert area_estimate("fermi", sm_count=0).chip_total == 0


def test_unknown_architecture():
    with pytest.raises(ValueError):
        area_estimate("kepler")


def test_machine_defaults_match_simulated_gpu():
    m = Machine()
    assert (m.thread_registers, m.max_warps, m.shared_memory, m.warp_size) \
        == (32768, 48, 49152, 32)
