import math
import random

import numpy as np
import pytest

from regslice.bundled import FLOAT_KERNELS, load_kernel, samples_text
from regslice.interp import InterpError, StepLimitExceeded, interpret
from regslice.minifloat import F32_FORMAT, FORMATS_BY_BITS, storage_round
from regslice.parser import parse
from regslice.tuner import (METRIC_BINARY, METRIC_DEVIATION, SampleError,
                            expand_sample, float_values, parse_samples,
                            quality, run_sample, tune)

from generators import random_float_kernel
from oracles import oracle_deviation_percent

F8 = FORMATS_BY_BITS[8]
F16 = FORMATS_BY_BITS[16]


# ---------------------------------------------------------------------------
# Interpreter semantics

def test_identity_assignment_is_bit_exact():
    # 10^4 (kernel, input) pairs: the all-32-bit storage path must be
    # indistinguishable from the plain evaluator, denormals and NaNs included
    rng = random.Random(42)
    for _ in range(1000):
        k = random_float_kernel(rng)
        all32 = {v: F32_FORMAT for v in float_values(k)}
        for _ in range(10):
            inputs = {p.name: rng.uniform(-1e6, 1e6) if rng.random() < 0.9
                      else rng.choice([0.0, -0.0, 1e-42, float("inf")])
                      for p in k.params}
            plain = interpret(k, inputs).outputs
            ident = interpret(k, inputs, all32).outputs
            assert len(plain) == len(ident)
            for a, b in zip(plain, ident):
                assert np.float32(a).tobytes() == np.float32(b).tobytes()


def test_multiply_by_zero_is_exact_at_8_bits():
    k = parse("""kernel z(x: f32) {
    block entry:
      zero = const f32 0.0
      y = mul f32 x, zero
      return y
    }""")
    # finite means finite after 8-bit storage: the format tops out at 15.5
    for x in (0.25, -3.5, 12.0, 15.5):
        out = interpret(k, {"x": x}, {"x": F8, "zero": F8, "y": F8}).outputs
        assert float(out[0]) == 0.0


def test_storage_rounding_of_sum_matches_oracle():
    k = parse("""kernel s(a: f32, b: f32) {
    block entry:
      y = add f32 a, b
      return y
    }""")
    out = interpret(k, {"a": 0.1, "b": 0.2}, {"y": F16}).outputs[0]
    exact = np.float32(np.float32(0.1) + np.float32(0.2))
    assert float(out) == storage_round(float(exact), F16)
    assert float(out) != float(exact)  # 16-bit storage is visible here


def test_integer_wrapping_and_division():
    k = parse("""kernel w() {
    block entry:
      a = const u32 4294967295
      b = add u32 a, 1
      c = const i32 -7
      d = div i32 c, 2
      e = div i32 c, 0
      store u32 b, 0
      store i32 d, 1
      store i32 e, 2
      return
    }""")
    out = interpret(k, {}).outputs
    assert out == [0, -3, 0]  # wraps; truncates toward zero; div by 0 is 0


def test_float_division_by_zero_propagates_ieee():
    k = parse("""kernel d(x: f32) {
    block entry:
      zero = const f32 0.0
      y = div f32 x, zero
      n = sub f32 y, y
      return y, n
    }""")
    y, n = interpret(k, {"x": 1.0}).outputs
    assert math.isinf(float(y)) and math.isnan(float(n))


def test_shift_semantics():
    k = parse("""kernel sh() {
    block entry:
      a = const u32 3
      b = shl u32 a, 35
      c = const i32 -8
      d = shr i32 c, 1
      e = shr i32 c, 40
      store u32 b, 0
      store i32 d, 1
      store i32 e, 2
      return
    }""")
    assert interpret(k, {}).outputs == [0, -4, -1]


def test_missing_binding_raises():
    k = load_kernel("axpy")
    with pytest.raises(InterpError, match="missing input"):
        interpret(k, {"a": 1.0, "x": 2.0})
    with pytest.raises(InterpError, match="unknown input"):
        interpret(k, {"a": 1.0, "x": 2.0, "b": 0.0, "zz": 1})


def test_step_limit():
    k = parse("""kernel spin() {
    block entry:
      jump loop
    block loop:
      jump loop
    }""")
    with pytest.raises(StepLimitExceeded):
        interpret(k, {}, max_steps=500)


def test_select_and_convert():
    k = parse("""kernel sc(n: i32 in [-5, 5]) {
    block entry:
      zero = const i32 0
      c = cmp lt i32 n, zero
      m = sub i32 zero, n
      a = select i32 c, m, n
      f = convert f32 a
      return f
    }""")
    assert float(interpret(k, {"n": -4}).outputs[0]) == 4.0
    assert float(interpret(k, {"n": 3}).outputs[0]) == 3.0


# ---------------------------------------------------------------------------
# Quality metric

def test_quality_identical_outputs():
    r = quality([1.0, 2.0, np.float32(3.5)], [1.0, 2.0, np.float32(3.5)])
    assert r.score == 0.0 and r.passed


def test_quality_ten_percent_example():
    r = quality([1.0], [0.9], METRIC_DEVIATION, threshold=10.0)
    assert r.score == pytest.approx(10.0)
    assert r.passed
    assert not quality([1.0], [0.9], METRIC_DEVIATION, 9.99).passed


def test_quality_matches_independent_recomputation():
    rng = random.Random(17)
    for _ in range(300):
        n = rng.randint(1, 20)
        ref = [rng.uniform(-100, 100) for _ in range(n)]
        cand = [x + rng.gauss(0, abs(x) * 0.05 + 0.01) for x in ref]
        got = quality(ref, cand).score
        want = oracle_deviation_percent(ref, cand)
        assert got == pytest.approx(want, rel=1e-12)


def test_quality_binary_metric():
    assert quality([1, 2.5], [1, 2.5], METRIC_BINARY).passed
    assert not quality([1, 2.5], [1, 2.5001], METRIC_BINARY).passed
    nan = float(np.float32("nan"))
    assert quality([nan], [nan], METRIC_BINARY).passed


def test_quality_shape_mismatch():
    with pytest.raises(ValueError, match="shapes"):
        quality([1.0], [1.0, 2.0])


def test_quality_nan_mismatch_fails_any_threshold():
    r = quality([1.0], [float("nan")], METRIC_DEVIATION, threshold=1e9)
    assert not r.passed


# ---------------------------------------------------------------------------
# Sample handling

def test_sample_parsing_and_expansion():
    k = load_kernel("axpy")
    samples = parse_samples("[s]\na = 1.0, 2.0\nx = 3.0\nb = 0.5, 1.5\n")
    bindings = expand_sample(k, samples[0])
    assert bindings == [{"a": 1.0, "x": 3.0, "b": 0.5},
                        {"a": 2.0, "x": 3.0, "b": 1.5}]


def test_sample_errors():
    k = load_kernel("axpy")
    with pytest.raises(SampleError, match="array lengths"):
        expand_sample(k, parse_samples("[s]\na = 1.0, 2.0\nx = 1.0, 2.0, 3.0\nb = 0\n")[0])
    with pytest.raises(SampleError, match="unknown parameter"):
        expand_sample(k, parse_samples("[s]\na = 1\nx = 1\nb = 1\nq = 2\n")[0])
    with pytest.raises(SampleError, match="misses parameter"):
        expand_sample(k, parse_samples("[s]\na = 1\nx = 1\n")[0])
    with pytest.raises(SampleError):
        parse_samples("a = 1\n")
    blend = load_kernel("blend")
    with pytest.raises(SampleError, match="declared range"):
        expand_sample(blend, parse_samples("[s]\nw = 400\na = 1\nb = 0\n")[0])


# ---------------------------------------------------------------------------
# Tuning

def test_tune_integer_only_kernel_is_empty():
    samples = parse_samples("[only]\nn = 5\n")
    rep = tune(load_kernel("clampsum"), samples, METRIC_DEVIATION, 0.0)
    assert rep.assignment == {}


def test_tune_annihilated_value_goes_to_8_bits():
    k = parse("""kernel z(x: f32) {
    block entry:
      zero = const f32 0.0
      y = mul f32 x, zero
      return y
    }""")
    # sample magnitudes stay inside the 8-bit format's finite range
    samples = parse_samples("[s]\nx = 0.5, 12.0, -7.25, 0.375\n")
    rep = tune(k, samples, METRIC_DEVIATION, 0.0)
    assert rep.assignment["x"].total_bits == 8
    # exhaustive check: every format keeps the output exact on these samples
    from regslice.minifloat import FORMATS
    ref = run_sample(k, samples[0], None)
    for fmt in FORMATS:
        out = run_sample(k, samples[0], {"x": fmt, "zero": fmt, "y": fmt})
        assert quality(ref, out, METRIC_BINARY).passed, fmt


def test_tune_binary_exact_postcondition():
    for name in FLOAT_KERNELS:
        k = load_kernel(name)
        samples = parse_samples(samples_text(name))
        rep = tune(k, samples, METRIC_BINARY, 0.0)
        for s in samples:
            ref = run_sample(k, s, None)
            cand = run_sample(k, s, rep.assignment)
            assert quality(ref, cand, METRIC_BINARY).passed, (name, s.name)


def test_tune_requires_samples():
    with pytest.raises(ValueError, match="sample"):
        tune(load_kernel("axpy"), [], METRIC_DEVIATION, 0.0)


def test_tune_monotone_wider_threshold_never_wider_formats():
    k = load_kernel("poly3")
    samples = parse_samples(samples_text("poly3"))
    tight = tune(k, samples, METRIC_DEVIATION, 0.0).assignment
    loose = tune(k, samples, METRIC_DEVIATION, 10.0).assignment
    total_tight = sum(f.total_bits for f in tight.values())
    total_loose = sum(f.total_bits for f in loose.values())
    assert total_loose <= total_tight
