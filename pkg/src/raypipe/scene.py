"""Scene IO and rendering: Wavefront OBJ subset in, binary PPM out.

The renderer exists to prove the datapath end to end: every pixel's ray
traverses the BVH through the simulated pipeline (or through the golden
kernels for the reference image) and the two images must be identical
byte for byte.  Shading is deliberately simple and deterministic: the
normalized barycentric coordinates of the closest hit become RGB.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

from .bvh import Bvh, build_bvh, trace_ray
from .f32 import f32
from .kernels import precompute_ray_transform, triangle_barycentrics
from .types import Ray, Triangle, Vec3

BACKGROUND = (0, 0, 0)


def load_obj(path) -> list:
    """Triangles from a Wavefront OBJ file.

    Only `v x y z` and triangular `f` records are interpreted; anything
    else (normals, textures, groups, polygons with more than three
    vertices) is skipped with a warning.  Face indices may be 1-based or
    negative-relative, with optional /texture/normal suffixes.
    """
    vertices = []
    triangles = []
    skipped = {}
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            tag = parts[0]
            if tag == "v" and len(parts) >= 4:
                try:
                    vertices.append(Vec3(f32(float(parts[1])), f32(float(parts[2])),
                                         f32(float(parts[3]))))
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: bad vertex: {line.strip()}") from exc
            elif tag == "f":
                refs = parts[1:]
                if len(refs) != 3:
                    skipped[f"f with {len(refs)} vertices"] = \
                        skipped.get(f"f with {len(refs)} vertices", 0) + 1
                    continue
                idx = []
                for r in refs:
                    head = r.split("/")[0]
                    try:
                        i = int(head)
                    except ValueError as exc:
                        raise ValueError(f"{path}:{lineno}: bad face index {r!r}") from exc
                    i = i - 1 if i > 0 else len(vertices) + i
                    if not 0 <= i < len(vertices):
                        raise ValueError(f"{path}:{lineno}: face index {r} out of range")
                    idx.append(i)
                triangles.append(Triangle(vertices[idx[0]], vertices[idx[1]],
                                          vertices[idx[2]], len(triangles)))
            else:
                skipped[tag] = skipped.get(tag, 0) + 1
    for tag, count in sorted(skipped.items()):
        warnings.warn(f"{path}: ignored {count} '{tag}' record(s)")
    return triangles


def scene_bounds(triangles: Sequence[Triangle]):
    lo = [math.inf] * 3
    hi = [-math.inf] * 3
    for t in triangles:
        for v in (t.v0, t.v1, t.v2):
            for a in range(3):
                lo[a] = min(lo[a], v[a])
                hi[a] = max(hi[a], v[a])
    return lo, hi


def camera_rays(triangles: Sequence[Triangle], width: int, height: int):
    """Deterministic auto-framed pinhole camera looking down -z.

    The eye sits above the scene's bounding box along +z; rays are not
    normalized (the parametric t is measured in direction lengths).
    """
    if triangles:
        lo, hi = scene_bounds(triangles)
        cx, cy, cz = ((lo[a] + hi[a]) / 2.0 for a in range(3))
        radius = max(max(hi[a] - lo[a] for a in range(3)) / 2.0, 1e-3)
    else:
        cx = cy = cz = 0.0
        radius = 1.0
    eye = Vec3(f32(cx), f32(cy), f32(cz + 2.5 * radius))
    extent = f32(8.0 * radius)
    span = 0.8  # half-width of the image plane at unit distance
    rays = []
    for py in range(height):
        for px in range(width):
            sx = ((px + 0.5) / width * 2.0 - 1.0) * span
            sy = (1.0 - (py + 0.5) / height * 2.0) * span * height / width
            direction = Vec3(f32(sx), f32(sy), -1.0)
            rays.append(precompute_ray_transform(eye, direction, extent))
    return rays


def shade(ray: Ray, tri: Triangle) -> tuple:
    """Normalized barycentrics of the hit as 8-bit RGB (gamma 1.0)."""
    u, v, w, det = triangle_barycentrics(ray, tri)
    out = []
    for comp in (u, v, w):
        c = comp / det if det != 0.0 else 0.0
        if not (c > 0.0):  # NaN or negative clamps to 0
            c = 0.0
        out.append(min(255, int(c * 255.0 + 0.5)))
    return tuple(out)


def render(triangles: Sequence[Triangle], width: int, height: int, *,
           datapath_factory: Optional[Callable] = None, threads: int = 1):
    """Render to raw RGB bytes (row-major, 3 bytes per pixel).

    datapath_factory builds one private datapath per worker; None renders
    with the golden kernels.  The output is identical for any thread
    count because pixels are independent and ray ops are stateless.
    """
    buf = bytearray(width * height * 3)
    if not triangles:
        if BACKGROUND != (0, 0, 0):
            for i in range(0, len(buf), 3):
                buf[i:i + 3] = bytes(BACKGROUND)
        return bytes(buf)

    bvh = build_bvh(triangles)
    rays = camera_rays(triangles, width, height)

    def run_band(band):
        y0, y1 = band
        dp = datapath_factory() if datapath_factory is not None else None
        for py in range(y0, y1):
            for px in range(width):
                i = py * width + px
                ray = rays[i]
                hit = trace_ray(ray, bvh, dp)
                if hit.hit:
                    tri = bvh.triangles[_tri_index(bvh, hit.triangle_id)]
                    buf[i * 3:i * 3 + 3] = bytes(shade(ray, tri))
                else:
                    buf[i * 3:i * 3 + 3] = bytes(BACKGROUND)

    bands = _bands(height, max(1, threads))
    if len(bands) == 1:
        run_band(bands[0])
    else:
        with ThreadPoolExecutor(max_workers=len(bands)) as pool:
            list(pool.map(run_band, bands))
    return bytes(buf)


def _tri_index(bvh: Bvh, tri_id: int) -> int:
    # triangle ids equal their list index in scenes built by this module
    return tri_id


def _bands(height: int, n: int):
    step = max(1, (height + n - 1) // n)
    return [(y, min(y + step, height)) for y in range(0, height, step)]


def write_ppm(path, width: int, height: int, pixels: bytes):
    """Binary PPM (P6), 8 bits per channel, gamma 1.0."""
    if len(pixels) != width * height * 3:
        raise ValueError("pixel buffer does not match the image dimensions")
    with open(path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        fh.write(pixels)


def ppm_bytes(width: int, height: int, pixels: bytes) -> bytes:
    return f"P6\n{width} {height}\n255\n".encode("ascii") + pixels


# --------------------------------------------------------------------------
# procedural meshes for demos and tests

def make_sphere(segments: int = 12, rings: int = 9, radius: float = 1.0,
                center=(0.0, 0.0, 0.0)) -> list:
    """Latitude/longitude sphere; triangles face outward."""
    cx, cy, cz = center
    verts = []
    for r in range(rings + 1):
        phi = math.pi * r / rings
        for s in range(segments):
            theta = 2.0 * math.pi * s / segments
            verts.append(Vec3(f32(cx + radius * math.sin(phi) * math.cos(theta)),
                              f32(cy + radius * math.sin(phi) * math.sin(theta)),
                              f32(cz + radius * math.cos(phi))))
    tris = []

    def vid(r, s):
        return r * segments + (s % segments)

    for r in range(rings):
        for s in range(segments):
            a, b = vid(r, s), vid(r, s + 1)
            c, d = vid(r + 1, s), vid(r + 1, s + 1)
            if r > 0:
                tris.append(Triangle(verts[a], verts[c], verts[b], len(tris)))
            if r < rings - 1:
                tris.append(Triangle(verts[b], verts[c], verts[d], len(tris)))
    return tris


def save_obj(path, triangles: Sequence[Triangle]):
    """Write triangles as a minimal OBJ (one vertex record per corner)."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# generated scene\n")
        n = 0
        for t in triangles:
            for v in (t.v0, t.v1, t.v2):
                fh.write(f"v {v[0]!r} {v[1]!r} {v[2]!r}\n")
            fh.write(f"f {n + 1} {n + 2} {n + 3}\n")
            n += 3
