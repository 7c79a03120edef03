"""IEEE-754 binary32 scalar arithmetic on top of Python floats.

Values are Python floats that are exactly representable in binary32.
Every operation here performs the computation in double precision and
rounds the result once to binary32 (round-to-nearest-even).  For +, -,
*, / this double-then-single rounding is identical to direct binary32
arithmetic because binary64 carries more than 2*24+2 significand bits;
test_f32.py cross-checks this bit-for-bit against numpy's float32.

Bit conversions go through an integer route so that NaN payloads,
including signalling NaNs, survive unchanged (a C-level float cast
would quieten them).
"""

from __future__ import annotations

import math
import struct

_PACK32 = struct.Struct("<f").pack
_UNPACK32 = struct.Struct("<f").unpack
_PACK64 = struct.Struct("<d").pack
_UNPACK64 = struct.Struct("<d").unpack
_PACKQ = struct.Struct("<Q").pack
_UNPACKQ = struct.Struct("<Q").unpack
_PACKI = struct.Struct("<I").pack
_UNPACKI = struct.Struct("<I").unpack

MAX = 3.4028234663852886e38        # largest finite binary32
MIN_NORMAL = 1.1754943508222875e-38
MIN_SUBNORMAL = 1.401298464324817e-45
INF = math.inf
NAN = math.nan

# RNE overflow boundary: magnitudes at or above 2**128 - 2**103 round to
# infinity; struct.pack('f') raises OverflowError past MAX, so the fast
# path is gated on this window.
_OVERFLOW = float(2**128 - 2**103)


def _round_slow(x: float) -> float:
    # beyond the |x| <= MAX fast window: overflow region or NaN
    if x >= _OVERFLOW:
        return INF
    if x <= -_OVERFLOW:
        return -INF
    if x != x:
        return _UNPACK32(_PACK32(x))[0]
    return MAX if x > 0.0 else -MAX


def round32(x: float) -> float:
    """Round a double to the nearest binary32 value (ties to even)."""
    if -MAX <= x <= MAX:
        return _UNPACK32(_PACK32(x))[0]
    return _round_slow(x)


# the arithmetic ops inline round32's fast window: they run tens of
# millions of times in the bulk equivalence checks
def fadd(a: float, b: float) -> float:
    x = a + b
    if -MAX <= x <= MAX:
        return _UNPACK32(_PACK32(x))[0]
    return _round_slow(x)


def fsub(a: float, b: float) -> float:
    x = a - b
    if -MAX <= x <= MAX:
        return _UNPACK32(_PACK32(x))[0]
    return _round_slow(x)


def fmul(a: float, b: float) -> float:
    x = a * b
    if -MAX <= x <= MAX:
        return _UNPACK32(_PACK32(x))[0]
    return _round_slow(x)


def fdiv(a: float, b: float) -> float:
    """Binary32 division; divisors of zero follow IEEE (x/0 = +-inf, 0/0 = NaN)."""
    if b == 0.0:
        if a == 0.0 or a != a:
            return NAN
        neg = (math.copysign(1.0, a) != math.copysign(1.0, b))
        return -INF if neg else INF
    return round32(a / b)


# Comparator-form selects, as a hardware min/max unit built from one IEEE
# comparison would evaluate them.  The comparison is false when either
# operand is NaN, so the first operand is returned in that case.
def pick_max(a: float, b: float) -> float:
    return b if b > a else a


def pick_min(a: float, b: float) -> float:
    return b if b < a else a


def to_bits(x: float) -> int:
    """binary32 bit pattern of x.  x must be binary32-representable;
    NaNs keep their payload (integer route, no hardware cast)."""
    if x == x:
        return _UNPACKI(_PACK32(x))[0]
    db = _UNPACKQ(_PACK64(x))[0]
    sign = db >> 63
    man = db & 0xFFFFFFFFFFFFF
    m32 = man >> 29
    if m32 == 0:
        m32 = 0x400000  # payload entirely in low bits: degrade to default qNaN
    return (sign << 31) | (0xFF << 23) | m32


def from_bits(bits: int) -> float:
    """Python float carrying exactly the given binary32 bit pattern."""
    sign = (bits >> 31) & 1
    exp = (bits >> 23) & 0xFF
    man = bits & 0x7FFFFF
    if exp == 0xFF:
        dbits = (sign << 63) | (0x7FF << 52) | (man << 29)
        return _UNPACK64(_PACKQ(dbits))[0]
    return _UNPACK32(_PACKI(bits))[0]


def _ordinal(bits: int) -> int:
    # monotonic signed ordinal of a binary32 bit pattern (+0 and -0 both 0)
    mag = bits & 0x7FFFFFFF
    return -mag if bits >> 31 else mag


def _from_ordinal(o: int) -> int:
    if o >= 0:
        return min(o, 0x7F800000)
    return 0x80000000 | min(-o, 0x7F800000)


def next_up(x: float, ulps: int = 1) -> float:
    """Move x toward +infinity by `ulps` binary32 steps (NaN unchanged)."""
    if x != x:
        return x
    return from_bits(_from_ordinal(_ordinal(to_bits(x)) + ulps))


def next_down(x: float, ulps: int = 1) -> float:
    """Move x toward -infinity by `ulps` binary32 steps (NaN unchanged)."""
    if x != x:
        return x
    return from_bits(_from_ordinal(_ordinal(to_bits(x)) - ulps))


def is_nan(x: float) -> bool:
    return x != x


def f32(x: float) -> float:
    """Coerce an arbitrary Python number to its binary32 rounding."""
    return round32(float(x))
