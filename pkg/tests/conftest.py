"""Shared helpers: deterministic random job generators and bit-level
serialization of outputs for exact comparisons."""

from __future__ import annotations

import struct

import numpy as np
import pytest

from raypipe.f32 import to_bits
from raypipe.kernels import precompute_ray_transform
from raypipe.types import Aabb, JobInput, Opcode, Triangle, Vec3

NAN = float("nan")
INF = float("inf")


def output_bits(out) -> bytes:
    """Serialize the opcode-selected part of a JobOutput bit-exactly."""
    op = out.opcode
    if op is Opcode.QUAD_BOX:
        b = out.box
        return struct.pack("<B4B4i4I4q", 0, *[int(h) for h in b.hit], *b.order,
                           *[to_bits(t) for t in b.tmin],
                           *[int(p) for p in b.child_ptr_sorted])
    if op is Opcode.TRIANGLE:
        t = out.tri
        return struct.pack("<BBIIi", 1, int(t.hit), to_bits(t.t_num),
                           to_bits(t.t_denom), t.triangle_id)
    d = out.dist
    return struct.pack("<BIBIIB", 2 if op is Opcode.EUCLIDEAN else 3,
                       to_bits(d.euclidean_accumulator), int(d.euclidean_reset),
                       to_bits(d.angular_dot_product), to_bits(d.angular_norm),
                       int(d.angular_reset))


def _vec3(row) -> Vec3:
    return Vec3(row[0], row[1], row[2])


def _ray_from(origin, direction, extent):
    return precompute_ray_transform(_vec3(origin), _vec3(direction), extent)


def _f32rows(rng, lo, hi, shape):
    return rng.uniform(lo, hi, shape).astype(np.float32).astype(float).tolist()


def box_jobs(seed: int, n: int):
    """Random quad-box jobs: geometry clustered around the ray paths so
    hits, misses, interior origins and sorted multi-hit cases all occur;
    a few percent carry special values (zero direction components with
    on-face origins, NaN corners, inverted or flat boxes)."""
    rng = np.random.default_rng(seed)
    chunk = 2048
    made = 0
    while made < n:
        m = min(chunk, n - made)
        origins = _f32rows(rng, -6, 6, (m, 3))
        dirs = _f32rows(rng, -1, 1, (m, 3))
        extents = _f32rows(rng, 0.5, 80, (m,))
        corners = rng.uniform(-12, 12, (m, 4, 6)).astype(np.float32).astype(float)
        salt = rng.random((m, 4))
        for i in range(m):
            d = dirs[i]
            if abs(d[0]) < 1e-4 and abs(d[1]) < 1e-4 and abs(d[2]) < 1e-4:
                d = [1.0, 0.5, 0.25]
            boxes = []
            for b in range(4):
                c = corners[i][b]
                lo = [min(c[0], c[3]), min(c[1], c[4]), min(c[2], c[5])]
                hi = [max(c[0], c[3]), max(c[1], c[4]), max(c[2], c[5])]
                if salt[i][0] < 0.02 and b == 0:
                    hi[1] = lo[1]  # flat box
                if salt[i][1] < 0.01 and b == 1:
                    lo, hi = hi, lo  # inverted box
                if salt[i][2] < 0.01 and b == 2:
                    lo[2] = NAN
                boxes.append(Aabb(_vec3(lo), _vec3(hi)))
            if salt[i][3] < 0.03:
                # coplanar setup: kill one direction component and pin the
                # origin onto the matching face of box 0
                axis = int(salt[i][3] * 1000) % 3
                d = list(d)
                d[axis] = 0.0 if salt[i][0] < 0.5 else -0.0
                o = list(origins[i])
                o[axis] = boxes[0].lo[axis] if salt[i][1] < 0.5 else boxes[0].hi[axis]
                origins[i] = o
            ray = _ray_from(origins[i], d, extents[i])
            yield JobInput(Opcode.QUAD_BOX, ray=ray, boxes=tuple(boxes),
                           child_ptr=(made * 4, made * 4 + 1, made * 4 + 2, made * 4 + 3))
            made += 1


def triangle_jobs(seed: int, n: int):
    """Random triangle jobs aimed loosely at the origin; a few percent
    are degenerate (repeated vertices or colinear) or carry NaN."""
    rng = np.random.default_rng(seed)
    chunk = 2048
    made = 0
    while made < n:
        m = min(chunk, n - made)
        origins = _f32rows(rng, -2, 2, (m, 3))
        dirs = _f32rows(rng, -1, 1, (m, 3))
        verts = rng.uniform(-4, 4, (m, 3, 3)).astype(np.float32).astype(float)
        extents = _f32rows(rng, 1, 60, (m,))
        salt = rng.random((m, 2))
        for i in range(m):
            d = dirs[i]
            if abs(d[0]) < 1e-4 and abs(d[1]) < 1e-4 and abs(d[2]) < 1e-4:
                d = [0.2, -0.4, 1.0]
            v = verts[i].tolist()
            if salt[i][0] < 0.02:
                v[1] = list(v[0])  # degenerate: repeated vertex
            if salt[i][1] < 0.01:
                v[2][1] = NAN
            tri = Triangle(_vec3(v[0]), _vec3(v[1]), _vec3(v[2]), made)
            yield JobInput(Opcode.TRIANGLE, ray=_ray_from(origins[i], d, extents[i]),
                           triangle=tri)
            made += 1


def _vector_payloads(rng, m, lanes):
    vals = rng.uniform(-3, 3, (m, 2, lanes)).astype(np.float32).astype(float)
    salt = rng.random(m)
    masks = rng.integers(0, 1 << lanes, m)
    full = rng.random(m) < 0.5
    return vals.tolist(), salt.tolist(), masks.tolist(), full.tolist()


def euclidean_jobs(seed: int, n: int, *, always_full_mask=False):
    rng = np.random.default_rng(seed)
    chunk = 4096
    made = 0
    while made < n:
        m = min(chunk, n - made)
        vals, salt, masks, full = _vector_payloads(rng, m, 16)
        resets = (rng.random(m) < 0.3).tolist()
        for i in range(m):
            a, b = vals[i]
            if salt[i] < 0.01:
                a[3] = NAN
            if salt[i] > 0.995:
                b[9] = INF
            mask = 0xFFFF if (always_full_mask or full[i]) else masks[i]
            yield JobInput(Opcode.EUCLIDEAN, euclidean_a=tuple(a), euclidean_b=tuple(b),
                           euclidean_mask=mask, reset_accumulator=resets[i])
            made += 1


def cosine_jobs(seed: int, n: int, *, always_full_mask=False):
    rng = np.random.default_rng(seed)
    chunk = 4096
    made = 0
    while made < n:
        m = min(chunk, n - made)
        vals, salt, masks, full = _vector_payloads(rng, m, 8)
        resets = (rng.random(m) < 0.3).tolist()
        for i in range(m):
            a, b = vals[i]
            a16 = tuple(a) + (0.0,) * 8
            b16 = tuple(b) + (0.0,) * 8
            mask = 0xFF if (always_full_mask or full[i]) else masks[i]
            yield JobInput(Opcode.COSINE, euclidean_a=a16, euclidean_b=b16,
                           euclidean_mask=mask, reset_accumulator=resets[i])
            made += 1


JOB_GENERATORS = {
    Opcode.QUAD_BOX: box_jobs,
    Opcode.TRIANGLE: triangle_jobs,
    Opcode.EUCLIDEAN: euclidean_jobs,
    Opcode.COSINE: cosine_jobs,
}


def mixed_jobs(seed: int, n: int):
    """Deterministic mixed-opcode stream (all four kinds, resets included)."""
    rng = np.random.default_rng(seed ^ 0x5EED)
    kinds = rng.integers(0, 4, n).tolist()
    gens = [iter(box_jobs(seed + 1, n)), iter(triangle_jobs(seed + 2, n)),
            iter(euclidean_jobs(seed + 3, n)), iter(cosine_jobs(seed + 4, n))]
    for k in kinds:
        yield next(gens[k])


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
