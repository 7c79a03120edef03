"""Golden single-call kernels for every operation the datapath performs.

These are the ground truth the pipelined implementation is checked
against, and also the building blocks of the stage logic itself: each
kernel is split into small step functions that the pipeline spreads
across stages, so both paths execute the identical sequence of rounded
binary32 operations.

Numeric conventions, fixed so results are reproducible bit for bit:

* every addition/subtraction/multiplication is individually rounded to
  binary32 (no fused multiply-add anywhere);
* min/max selects use one IEEE comparison each (`b if b > a else a`,
  literally), so a comparison involving NaN selects the first operand;
* the box test orders each axis's two slab distances by direction sign
  and redirects 0*inf NaNs so that a ray lying in a box face plane can
  never hit (the entry distance becomes +inf or the exit -inf);
* reduction trees are balanced and fixed: (x y) (z bound) for the slab
  reduces, adjacent pairs for the vector adder trees.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

from .f32 import fadd, fdiv, fmul, fsub, pick_max, pick_min
from .types import Aabb, BoxResult, Ray, Triangle, TriangleResult, Vec3

_INF = math.inf


class SlabResult(NamedTuple):
    hit: bool
    tmin: float
    tmax: float


class GeometryError(ValueError):
    """Raised for inputs with no defined transform (e.g. a zero direction)."""


# --------------------------------------------------------------------------
# ray transform precompute (runs on the host at ray creation, not in the
# datapath: it is the only place needing division)

def precompute_ray_transform(origin: Vec3, direction: Vec3, extent: float) -> Ray:
    """Build a Ray with inverse direction, axis permutation and shear.

    kz indexes the largest |direction| component (ties prefer z, then y,
    then x); kx/ky are swapped when direction[kz] < 0 so the renaming
    preserves winding.  All divisions are binary32-rounded.
    """
    dx, dy, dz = direction
    ax, ay, az = abs(dx), abs(dy), abs(dz)
    if az >= ay and az >= ax:
        kz = 2
    elif ay >= ax:
        kz = 1
    else:
        kz = 0
    if not (ax > 0.0 or ay > 0.0 or az > 0.0):
        if ax != ax or ay != ay or az != az:
            kz = 2  # NaN direction: transform is NaN-valued but defined
        else:
            raise GeometryError("ray direction must not be the zero vector")
    kx = (kz + 1) % 3
    ky = (kx + 1) % 3
    if direction[kz] < 0.0:
        kx, ky = ky, kx
    sz = fdiv(1.0, direction[kz])
    sx = fdiv(direction[kx], direction[kz])
    sy = fdiv(direction[ky], direction[kz])
    inv = Vec3(fdiv(1.0, dx), fdiv(1.0, dy), fdiv(1.0, dz))
    return Ray(origin, direction, inv, extent, kx, ky, kz, Vec3(sx, sy, sz))


# --------------------------------------------------------------------------
# slab ray-box test

def box_translate(box: Aabb, origin: Vec3):
    """Step 1: both corners relative to the ray origin (6 subtractions)."""
    lo, hi = box
    ox, oy, oz = origin
    lo_rel = (fsub(lo[0], ox), fsub(lo[1], oy), fsub(lo[2], oz))
    hi_rel = (fsub(hi[0], ox), fsub(hi[1], oy), fsub(hi[2], oz))
    return lo_rel, hi_rel


def box_products(lo_rel, hi_rel, inv: Vec3):
    """Step 2: per-axis slab distances via the inverse direction (6 muls)."""
    t_lo = (fmul(lo_rel[0], inv[0]), fmul(lo_rel[1], inv[1]), fmul(lo_rel[2], inv[2]))
    t_hi = (fmul(hi_rel[0], inv[0]), fmul(hi_rel[1], inv[1]), fmul(hi_rel[2], inv[2]))
    return t_lo, t_hi


def inv_signs(inv: Vec3):
    """Per-axis sign of the inverse direction (sign bit, so -0.0 counts
    as negative); fixed per ray, shared by all four box tests."""
    return (math.copysign(1.0, inv[0]) < 0.0,
            math.copysign(1.0, inv[1]) < 0.0,
            math.copysign(1.0, inv[2]) < 0.0)


def box_interval(t_lo, t_hi, negs, t_beg: float, t_end: float) -> SlabResult:
    """Steps 3-4: order the per-axis intervals, reduce, decide the hit.

    The direction sign picks which product is the entry candidate; one
    comparison per axis then orders the pair.  With a NaN candidate
    (origin on a slab plane times an infinite inverse) the comparison is
    false and both selects fall back to the same non-NaN side, so the
    interval collapses to a +inf entry or a -inf exit and the box cannot
    be hit.  tmin is the entry distance clamped to t_beg (reported even
    for interior origins); the hit additionally requires the exit to lie
    strictly past t_beg, which rejects rays that start on a face or
    corner and point away, while a zero-thickness box crossed ahead of
    the origin still hits.  Every select is the literal one-comparison
    form, so any NaN reaching a reduce loses the comparison.
    """
    if negs[0]:
        nc, fc = t_hi[0], t_lo[0]
    else:
        nc, fc = t_lo[0], t_hi[0]
    nx = nc if nc < fc else fc
    fx = fc if fc > nc else nc
    if negs[1]:
        nc, fc = t_hi[1], t_lo[1]
    else:
        nc, fc = t_lo[1], t_hi[1]
    ny = nc if nc < fc else fc
    fy = fc if fc > nc else nc
    if negs[2]:
        nc, fc = t_hi[2], t_lo[2]
    else:
        nc, fc = t_lo[2], t_hi[2]
    nz = nc if nc < fc else fc
    fz = fc if fc > nc else nc
    # balanced reduces: (x y) against (z bound)
    m1 = ny if ny > nx else nx
    m2 = t_beg if t_beg > nz else nz
    tmin = m2 if m2 > m1 else m1
    k1 = fy if fy < fx else fx
    k2 = t_end if t_end < fz else fz
    tmax = k2 if k2 < k1 else k1
    hit = (tmin <= tmax) and (tmax > t_beg)
    return SlabResult(hit, tmin, tmax)


def slab_box_test(ray: Ray, box: Aabb, t_beg: float, t_end: float) -> SlabResult:
    """Single ray-box slab test over the interval [t_beg, t_end]."""
    lo_rel, hi_rel = box_translate(box, ray.origin)
    t_lo, t_hi = box_products(lo_rel, hi_rel, ray.inv_dir)
    return box_interval(t_lo, t_hi, inv_signs(ray.inv_dir), t_beg, t_end)


def sort4(keys: Sequence[float], payload: Sequence) -> tuple:
    """Order four keyed entries with the fixed five-comparator network
    (0,1)(2,3)(0,2)(1,3)(1,2); a comparator exchanges only on strictly
    greater keys, so ties keep ascending original index.

    Returns the permutation of input indices; payload is accepted for
    interface parity with the hardware unit and permuted by the caller.
    """
    k = [keys[0], keys[1], keys[2], keys[3]]
    idx = [0, 1, 2, 3]
    for a, b in ((0, 1), (2, 3), (0, 2), (1, 3), (1, 2)):
        if k[a] > k[b]:
            k[a], k[b] = k[b], k[a]
            idx[a], idx[b] = idx[b], idx[a]
    return tuple(idx)


def quad_box_test(ray: Ray, boxes: Sequence[Aabb], ptrs: Sequence) -> BoxResult:
    """Four parallel slab tests plus the intersection-order sort.

    Sort keys are the clamped entry distances for hits and +inf for
    misses, so hit boxes come first in nondecreasing tmin order.
    """
    negs = inv_signs(ray.inv_dir)
    origin = ray.origin
    inv = ray.inv_dir
    extent = ray.extent
    hits = []
    tmins = []
    keys = []
    for box in boxes:
        lo_rel, hi_rel = box_translate(box, origin)
        t_lo, t_hi = box_products(lo_rel, hi_rel, inv)
        r = box_interval(t_lo, t_hi, negs, 0.0, extent)
        hits.append(r.hit)
        tmins.append(r.tmin)
        keys.append(r.tmin if r.hit else _INF)
    order = sort4(keys, ptrs)
    return BoxResult(tuple(hits), order, tuple(tmins),
                     tuple(ptrs[i] for i in order))


# --------------------------------------------------------------------------
# watertight ray-triangle test

def tri_translate(tri: Triangle, origin: Vec3):
    """Vertices relative to the ray origin (9 subtractions)."""
    ox, oy, oz = origin
    out = []
    for v in (tri.v0, tri.v1, tri.v2):
        out.append((fsub(v[0], ox), fsub(v[1], oy), fsub(v[2], oz)))
    return out[0], out[1], out[2]


def tri_shear_products(a, b, c, ray: Ray):
    """Shear multiplications: Sx*vz, Sy*vz and the final z term Sz*vz
    for each vertex (9 multiplications)."""
    sx, sy, sz = ray.shear
    kz = ray.kz
    out = []
    for v in (a, b, c):
        vz = v[kz]
        out.append((fmul(sx, vz), fmul(sy, vz), fmul(sz, vz)))
    return tuple(out)


def tri_shear_offsets(a, b, c, shear_mul, kx: int, ky: int):
    """Sheared 2D coordinates: vx' = v[kx] - Sx*v[kz] etc (6 subtractions)."""
    out = []
    for v, m in zip((a, b, c), shear_mul):
        out.append(fsub(v[kx], m[0]))
        out.append(fsub(v[ky], m[1]))
    return tuple(out)  # Ax, Ay, Bx, By, Cx, Cy


def tri_bary_products(xy):
    """The six cross products feeding the barycentrics (6 multiplications)."""
    ax, ay, bx, by, cx, cy = xy
    return (fmul(bx, cy), fmul(by, cx),
            fmul(cx, ay), fmul(cy, ax),
            fmul(ax, by), fmul(ay, bx))


def tri_bary_edges(prod):
    """U, V, W as differences of the cross products (3 subtractions).

    Orientation: positive for triangles wound counter-clockwise in the
    sheared frame, i.e. dir . ((v1-v0) x (v2-v0)) > 0, the front side.
    """
    return (fsub(prod[0], prod[1]), fsub(prod[2], prod[3]), fsub(prod[4], prod[5]))


def tri_distance_products(u, v, w, shear_mul):
    """U*Az, V*Bz, W*Cz (3 multiplications)."""
    return (fmul(u, shear_mul[0][2]), fmul(v, shear_mul[1][2]), fmul(w, shear_mul[2][2]))


def tri_hit_test(u, v, w, det, t, extent):
    """Backface-culled hit decision.

    Edge and vertex grazes (a barycentric exactly zero) count as hits;
    coplanar and degenerate cases give det <= 0 or NaN and miss.  Every
    comparison is IEEE, so any NaN operand forces a miss.
    """
    ed = fmul(extent, det)
    return (u >= 0.0) and (v >= 0.0) and (w >= 0.0) and (det > 0.0) \
        and (t >= 0.0) and (t <= ed)


def watertight_triangle_test(ray: Ray, tri: Triangle, *, flip_winding: bool = False) -> TriangleResult:
    """Watertight ray-triangle intersection against the precomputed ray.

    Returns the distance as the (t_num, t_denom) pair with t_denom > 0
    on a hit.  flip_winding accepts the back face instead; it exists for
    mutation testing of the validation suite.
    """
    a, b, c = tri_translate(tri, ray.origin)
    sm = tri_shear_products(a, b, c, ray)
    xy = tri_shear_offsets(a, b, c, sm, ray.kx, ray.ky)
    u, v, w = tri_bary_edges(tri_bary_products(xy))
    det = fadd(fadd(u, v), w)
    tp = tri_distance_products(u, v, w, sm)
    t = fadd(fadd(tp[0], tp[1]), tp[2])
    if flip_winding:
        ed = fmul(ray.extent, det)
        hit = (u <= 0.0) and (v <= 0.0) and (w <= 0.0) and (det < 0.0) \
            and (t <= 0.0) and (t >= ed)
    else:
        hit = tri_hit_test(u, v, w, det, t, ray.extent)
    return TriangleResult(hit, t, det, tri.tri_id)


def triangle_barycentrics(ray: Ray, tri: Triangle):
    """(U, V, W, det) of the intersection; host-side helper for shading."""
    a, b, c = tri_translate(tri, ray.origin)
    sm = tri_shear_products(a, b, c, ray)
    xy = tri_shear_offsets(a, b, c, sm, ray.kx, ray.ky)
    u, v, w = tri_bary_edges(tri_bary_products(xy))
    det = fadd(fadd(u, v), w)
    return u, v, w, det


# --------------------------------------------------------------------------
# vector distance kernels (16-lane euclidean, 8-lane cosine)

def add_pairs(values):
    """One level of the fixed balanced adder tree: adjacent pairs."""
    return tuple(fadd(values[i], values[i + 1]) for i in range(0, len(values), 2))


def euclidean_diffs(a, b, mask: int):
    """Masked lane differences; disabled lanes are gated to +0.0."""
    return tuple(fsub(a[i], b[i]) if (mask >> i) & 1 else 0.0 for i in range(16))


def euclidean_squares(diffs):
    return tuple(fmul(d, d) for d in diffs)


def euclidean_partial(a, b, mask: int) -> float:
    """Sum of squared lane differences for one 16-lane beat.

    Masked-out lanes contribute +0.0 regardless of their contents; the
    16->8->4->2->1 tree is fixed so multi-beat accumulations are
    reproducible bit for bit.
    """
    s = euclidean_squares(euclidean_diffs(a, b, mask))
    s = add_pairs(s)
    s = add_pairs(s)
    s = add_pairs(s)
    return add_pairs(s)[0]


def cosine_products(a, b, mask: int):
    """Masked lane products a*b and b*b over the 8 cosine lanes."""
    p = tuple(fmul(a[i], b[i]) if (mask >> i) & 1 else 0.0 for i in range(8))
    q = tuple(fmul(b[i], b[i]) if (mask >> i) & 1 else 0.0 for i in range(8))
    return p, q


def cosine_partial(a, b, mask: int):
    """(dot, norm) partials for one 8-lane beat; norm accumulates the
    candidate vector's b_i * b_i (the query norm is the host's job)."""
    p, q = cosine_products(a, b, mask)
    p = add_pairs(add_pairs(add_pairs(p)))
    q = add_pairs(add_pairs(add_pairs(q)))
    return p[0], q[0]
