"""The binary32 layer is checked against numpy's float32 arithmetic as
an independent oracle, plus bit-level round trips including NaN payloads."""

import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raypipe import f32


def _np32(x):
    return np.float32(x)


@pytest.mark.parametrize("op,npop", [
    (f32.fadd, np.add), (f32.fsub, np.subtract), (f32.fmul, np.multiply),
])
def test_ops_match_numpy_bulk(op, npop, rng):
    exps = rng.integers(-149, 128, size=(20000, 2))
    signs = rng.choice([-1.0, 1.0], size=(20000, 2))
    mants = rng.random((20000, 2)) + 1.0
    a = (signs[:, 0] * mants[:, 0] * np.exp2(exps[:, 0].astype(np.float64))).astype(np.float32)
    b = (signs[:, 1] * mants[:, 1] * np.exp2(exps[:, 1].astype(np.float64))).astype(np.float32)
    with np.errstate(all="ignore"):
        ref = npop(a, b).view(np.uint32)
    af = a.astype(float).tolist()
    bf = b.astype(float).tolist()
    for i in range(len(af)):
        mine = f32.to_bits(op(af[i], bf[i]))
        theirs = int(ref[i])
        if (mine & 0x7FFFFFFF) > 0x7F800000 and (theirs & 0x7FFFFFFF) > 0x7F800000:
            continue  # both NaN; payload bits may differ between routes
        assert mine == theirs, (af[i], bf[i])


def test_div_matches_numpy(rng):
    a = rng.uniform(-1e30, 1e30, 5000).astype(np.float32)
    b = rng.uniform(-1e10, 1e10, 5000).astype(np.float32)
    b[::97] = 0.0
    b[1::97] = -0.0
    with np.errstate(all="ignore"):
        ref = (a / b).view(np.uint32)
    af, bf = a.astype(float).tolist(), b.astype(float).tolist()
    for i in range(len(af)):
        mine = f32.to_bits(f32.fdiv(af[i], bf[i]))
        theirs = int(ref[i])
        if (mine & 0x7FFFFFFF) > 0x7F800000 and (theirs & 0x7FFFFFFF) > 0x7F800000:
            continue
        assert mine == theirs


def test_overflow_rounds_to_infinity():
    big = 3.0e38
    assert f32.fadd(big, big) == math.inf
    assert f32.fadd(-big, -big) == -math.inf
    assert f32.fmul(big, -big) == -math.inf
    # just below the RNE boundary stays finite
    assert f32.round32(3.402823567797336e38) == f32.MAX


def test_zero_and_inf_division():
    assert f32.fdiv(1.0, 0.0) == math.inf
    assert f32.fdiv(1.0, -0.0) == -math.inf
    assert f32.fdiv(-1.0, 0.0) == -math.inf
    assert math.isnan(f32.fdiv(0.0, 0.0))
    assert f32.fmul(0.0, math.inf) != f32.fmul(0.0, math.inf)  # NaN


def test_bits_roundtrip_all_specials():
    patterns = [0x00000000, 0x80000000, 0x3F800000, 0xBF800000, 0x7F800000,
                0xFF800000, 0x7FC00000, 0x7FC12345, 0xFFC12345,
                0x7F800001,  # signalling NaN survives the integer route
                0x00000001, 0x807FFFFF, 0x7F7FFFFF]
    for p in patterns:
        assert f32.to_bits(f32.from_bits(p)) == p


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=2000, deadline=None)
def test_bits_roundtrip_exhaustive_sample(p):
    assert f32.to_bits(f32.from_bits(p)) == p


def test_next_up_down():
    one_up = f32.next_up(1.0)
    assert struct.unpack("<I", struct.pack("<f", 1.0))[0] + 1 == f32.to_bits(one_up)
    assert f32.next_down(one_up) == 1.0
    assert f32.next_up(0.0) == f32.from_bits(1)
    assert f32.next_down(0.0) == -f32.from_bits(1)
    assert f32.next_up(-f32.from_bits(1)) == 0.0
    assert f32.next_up(f32.MAX, 2) == math.inf
    assert f32.next_up(1.0, 8) == f32.from_bits(f32.to_bits(1.0) + 8)


def test_comparator_selects():
    nan = float("nan")
    assert f32.pick_max(1.0, 2.0) == 2.0
    assert f32.pick_max(2.0, 1.0) == 2.0
    assert math.isnan(f32.pick_max(nan, 1.0))   # NaN first operand persists
    assert f32.pick_max(1.0, nan) == 1.0        # NaN never wins the comparison
    assert math.isnan(f32.pick_min(nan, 1.0))
    assert f32.pick_min(1.0, nan) == 1.0


@given(st.floats(width=32, allow_nan=False), st.floats(width=32, allow_nan=False))
@settings(max_examples=500, deadline=None)
def test_comparator_matches_math_without_nan(a, b):
    assert f32.pick_max(a, b) == max(a, b) or (a == b)
    assert f32.pick_min(a, b) == min(a, b) or (a == b)
