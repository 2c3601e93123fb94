"""Tour of the reduced-precision float formats.

Seven formats from 8 to 32 bits, each a whole number of 4-bit slices.
Narrower storage keeps the sign, a smaller exponent, and fewer mantissa
bits; conversion back up to 32 bits is always exact, so the only error is
introduced once, at the downward rounding.
"""

import math

from regslice import FORMATS, convert_down, convert_up, storage_round
from regslice.minifloat import max_finite, min_normal

x = math.pi
print(f"storing x = {x!r} in every format:")
print(f"{'format':>12} {'stored value':>20} {'abs error':>12}")
for fmt in FORMATS:
    stored = storage_round(x, fmt)
    print(f"{str(fmt):>12} {stored!r:>20} {abs(x - stored):>12.3e}")

print("\nformat envelopes:")
for fmt in FORMATS:
    print(f"  {fmt}: smallest normal {min_normal(fmt):.3e}, "
          f"largest finite {max_finite(fmt):.3e}")

print("\nspecial values survive every format:")
fmt8 = FORMATS[-1]
for v in (math.inf, -math.inf, math.nan, 0.0, -0.0):
    bits = convert_down(v, fmt8)
    back = convert_up(bits)
    print(f"  {v!r:>6} -> raw 0x{bits.raw:02x} -> {back!r}")

print("\nvalues below the smallest normal flush to zero:")
tiny = min_normal(fmt8) / 2
print(f"  {tiny!r} in {fmt8} -> {convert_up(convert_down(tiny, fmt8))!r}")
