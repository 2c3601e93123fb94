"""Kernels and sample-input sets that ship with the package.

These are the inputs the demos, the CLI walkthroughs, and the acceptance
suite run against. `loopnest` is the two-level counter loop whose analysis
the range-analysis demo walks through step by step.
"""

from __future__ import annotations

from .ir import Kernel
from .parser import parse

LOOPNEST = """\
# Two nested counter loops; the inner trip count follows the outer counter.
# Prints the counter inside the inner loop and once after the outer loop.
kernel loopnest() {
block entry:
  k0 = const u32 0
  jump outer
block outer:
  k1 = phi u32 [k0, entry], [k2, outer_latch]
  c0 = cmp lt u32 k1, 50
  branch c0, outer_body, exit
block outer_body:
  i0 = const u32 0
  j0 = add u32 k1, 0
  jump inner
block inner:
  i1 = phi u32 [i0, outer_body], [i2, inner_body]
  c1 = cmp lt u32 i1, j0
  branch c1, inner_body, outer_latch
block inner_body:
  store u32 k1, 0
  i2 = add u32 i1, 1
  jump inner
block outer_latch:
  k2 = add u32 k1, 1
  jump outer
block exit:
  store u32 k1, 1
  return
}
"""

AXPY = """\
# y = a*x + b, evaluated per element.
kernel axpy(a: f32, x: f32, b: f32) {
block entry:
  t0 = mul f32 a, x
  y = add f32 t0, b
  return y
}
"""

POLY3 = """\
# Cubic polynomial in Horner form with fixed coefficients.
kernel poly3(x: f32) {
block entry:
  c3 = const f32 0.75
  c2 = const f32 -1.5
  c1 = const f32 0.25
  c0 = const f32 2.0
  t0 = mul f32 c3, x
  t1 = add f32 t0, c2
  t2 = mul f32 t1, x
  t3 = add f32 t2, c1
  t4 = mul f32 t3, x
  y = add f32 t4, c0
  return y
}
"""

DIST = """\
# Squared distance plus its reciprocal square root (SFU path).
kernel dist(x1: f32, y1: f32, x2: f32, y2: f32) {
block entry:
  dx = sub f32 x1, x2
  dy = sub f32 y1, y2
  dx2 = mul f32 dx, dx
  dy2 = mul f32 dy, dy
  d2 = add f32 dx2, dy2
  inv = rsqrt f32 d2
  return d2, inv
}
"""

BLEND = """\
# Integer weight in [0,255] blended into a float interpolation.
kernel blend(w: u32 in [0, 255], a: f32, b: f32) {
block entry:
  wf = convert f32 w
  scale = const f32 0.00392156863
  t = mul f32 wf, scale
  one = const f32 1.0
  u = sub f32 one, t
  pa = mul f32 a, t
  pb = mul f32 b, u
  y = add f32 pa, pb
  return y
}
"""

CLAMPSUM = """\
# Integer-only kernel: saturating accumulation of a bounded parameter.
kernel clampsum(n: u32 in [0, 100]) {
block entry:
  s0 = const u32 0
  i0 = const u32 0
  jump loop
block loop:
  i1 = phi u32 [i0, entry], [i2, body]
  s1 = phi u32 [s0, entry], [s3, body]
  c = cmp lt u32 i1, n
  branch c, body, done
block body:
  s2 = add u32 s1, i1
  s3 = min u32 s2, 255
  i2 = add u32 i1, 1
  jump loop
block done:
  store u32 s1, 0
  return s1
}
"""

_KERNELS = {
    "loopnest": LOOPNEST,
    "axpy": AXPY,
    "poly3": POLY3,
    "dist": DIST,
    "blend": BLEND,
    "clampsum": CLAMPSUM,
}

SAMPLES = {
    "axpy": """\
[small]
a = 0.5, 1.25, -0.75, 2.0
x = 1.0, -2.0, 3.5, 0.125
b = 0.25, 0.25, -1.0, 4.0
[edge]
a = 0.0, 1000.0
x = 123.456, -0.001
b = -0.5, 0.5
""",
    "poly3": """\
[sweep]
x = -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0
[wide]
x = -8.0, -3.5, 2.5, 7.75
""",
    "dist": """\
[grid]
x1 = 0.0, 1.0, -3.0, 10.0
y1 = 0.0, 2.0, 4.0, -10.0
x2 = 1.0, 1.5, -2.0, 9.0
y2 = 1.0, 2.5, 3.0, -12.0
""",
    "blend": """\
[ramp]
w = 0, 64, 128, 192, 255
a = 1.0, 1.0, 1.0, 1.0, 1.0
b = 0.0, 0.25, 0.5, 0.75, 1.0
""",
}

FLOAT_KERNELS = ("axpy", "poly3", "dist", "blend")


def kernel_names() -> tuple[str, ...]:
    return tuple(_KERNELS)


def kernel_text(name: str) -> str:
    return _KERNELS[name]


def load_kernel(name: str) -> Kernel:
    return parse(_KERNELS[name])


def samples_text(name: str) -> str:
    return SAMPLES[name]
