"""Domain data types shared by the kernels, the pipeline and the harness.

All floating-point fields hold binary32-representable Python floats
(see f32.py).  NaN and infinities are legal field values everywhere and
are carried through untouched; nothing in this module sanitises them.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from enum import Enum
from typing import NamedTuple, Optional


class Vec3(NamedTuple):
    x: float
    y: float
    z: float


class Aabb(NamedTuple):
    """Axis-aligned box given by its minimum and maximum corners.

    The intersection kernel accepts arbitrary corner values; ordering
    (lo <= hi per axis) is only enforced where boxes are built, in the
    BVH harness.
    """

    lo: Vec3
    hi: Vec3


class Triangle(NamedTuple):
    v0: Vec3
    v1: Vec3
    v2: Vec3
    tri_id: int = 0


class Opcode(Enum):
    QUAD_BOX = "quad_box"
    TRIANGLE = "triangle"
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"
    BUBBLE = "bubble"  # empty pipeline slot; never a legal external input


@dataclass(frozen=True)
class Ray:
    """A ray plus the constants precomputed at ray-creation time.

    kx/ky/kz are a winding-preserving permutation of the axes with the
    dominant direction component on kz; shear holds the (Sx, Sy, Sz)
    constants of the affine transform that maps the ray onto the unit
    +z ray.  inv_dir is the element-wise binary32 reciprocal of the
    direction.  Use kernels.precompute_ray_transform to build one.
    """

    origin: Vec3
    direction: Vec3
    inv_dir: Vec3
    extent: float
    kx: int
    ky: int
    kz: int
    shear: Vec3

    def __post_init__(self):
        if {self.kx, self.ky, self.kz} != {0, 1, 2}:
            raise ValueError(f"axis indices must permute {{0,1,2}}: "
                             f"({self.kx},{self.ky},{self.kz})")
        d = self.direction
        dz = abs(d[self.kz])
        # dominance only checkable for finite directions
        if dz == dz and dz != float("inf"):
            if abs(d[self.kx]) > dz or abs(d[self.ky]) > dz:
                raise ValueError("kz must index the largest |direction| component")


ZERO3 = Vec3(0.0, 0.0, 0.0)
ZERO16 = (0.0,) * 16

#: Box that can never be hit: NaN corners poison every slab interval.
NULL_BOX = Aabb(Vec3(float("nan"), float("nan"), float("nan")),
                Vec3(float("nan"), float("nan"), float("nan")))

NULL_TRIANGLE = Triangle(ZERO3, ZERO3, ZERO3, 0)


def _default_ray() -> Ray:
    # unit +z ray; the transform constants are the fixed point of the
    # precompute (kz=2, shear=(0,0,1))
    return Ray(ZERO3, Vec3(0.0, 0.0, 1.0), Vec3(float("inf"), float("inf"), 1.0),
               0.0, 0, 1, 2, Vec3(0.0, 0.0, 1.0))


DEFAULT_RAY = _default_ray()


@dataclass(frozen=True)
class JobInput:
    """One external request to the datapath.

    Only the payload selected by `opcode` is interpreted; the remaining
    fields are don't-care and default to inert values.  For COSINE only
    lanes 0-7 of euclidean_a/euclidean_b and mask bits 0-7 are used.
    """

    opcode: Opcode
    ray: Ray = DEFAULT_RAY
    boxes: tuple = (NULL_BOX, NULL_BOX, NULL_BOX, NULL_BOX)
    child_ptr: tuple = (0, 0, 0, 0)
    triangle: Triangle = NULL_TRIANGLE
    euclidean_a: tuple = ZERO16
    euclidean_b: tuple = ZERO16
    euclidean_mask: int = 0xFFFF
    reset_accumulator: bool = False

    def __post_init__(self):
        if self.opcode is Opcode.BUBBLE:
            raise ValueError("BUBBLE is an internal slot marker, not a submittable opcode")
        if len(self.boxes) != 4 or len(self.child_ptr) != 4:
            raise ValueError("quad-box payload must carry exactly 4 boxes and 4 child pointers")
        if len(self.euclidean_a) != 16 or len(self.euclidean_b) != 16:
            raise ValueError("vector payload must carry 16 lanes")


class BoxResult(NamedTuple):
    """Result of the 4-wide box test.

    hit and tmin are in input-box order; `order` lists input indices
    sorted by intersection (hits first, ascending tmin, stable), and
    child_ptr_sorted carries the node pointers permuted the same way.
    """

    hit: tuple
    order: tuple
    tmin: tuple
    child_ptr_sorted: tuple


class TriangleResult(NamedTuple):
    """Triangle hit with the distance as a numerator/denominator pair
    (t = t_num / t_denom; the datapath never divides)."""

    hit: bool
    t_num: float
    t_denom: float
    triangle_id: int


class DistanceResult(NamedTuple):
    euclidean_accumulator: float
    euclidean_reset: bool
    angular_dot_product: float
    angular_norm: float
    angular_reset: bool


MISS_BOX_RESULT = BoxResult((False,) * 4, (0, 1, 2, 3), (0.0,) * 4, (0, 0, 0, 0))
MISS_TRIANGLE_RESULT = TriangleResult(False, 0.0, 0.0, 0)
ZERO_DISTANCE_RESULT = DistanceResult(0.0, False, 0.0, 0.0, False)


class JobOutput(NamedTuple):
    opcode: Opcode
    box: BoxResult
    tri: TriangleResult
    dist: DistanceResult


# --------------------------------------------------------------------------
# The record every interior pipeline stage carries.

@dataclass(slots=True)
class SharedRecord:
    """Union-of-everything record registered at every stage boundary.

    One definition covers the whole pipeline: the full input bundle plus
    every operation's intermediates plus the output fields.  Each field
    is produced by exactly one stage for a given job and read only by
    later stages (the datapath's debug mode asserts this).  Unused
    fields stay None -- the software analog of register bits a logic
    synthesiser would strip as dead.
    """

    job_seq: int = -1
    opcode: Opcode = Opcode.BUBBLE

    # input bundle (stage 1)
    ray: Optional[Ray] = None
    boxes: Optional[tuple] = None
    child_ptr: Optional[tuple] = None
    triangle: Optional[Triangle] = None
    vec_a: Optional[tuple] = None
    vec_b: Optional[tuple] = None
    vec_mask: int = 0
    reset_acc: bool = False

    # quad-box intermediates
    box_lo_rel: Optional[tuple] = None   # stage 2: lo - origin, 4 x 3
    box_hi_rel: Optional[tuple] = None   # stage 2
    box_t_lo: Optional[tuple] = None     # stage 3: products with inv_dir
    box_t_hi: Optional[tuple] = None     # stage 3
    box_tmin: Optional[tuple] = None     # stage 4 (clamped entry distances)
    box_tmax: Optional[tuple] = None     # stage 4
    box_hit: Optional[tuple] = None      # stage 4
    box_order: Optional[tuple] = None    # stage 4 (sort network output)
    box_ptr_sorted: Optional[tuple] = None

    # triangle intermediates
    tri_a: Optional[tuple] = None        # stage 2: translated vertices
    tri_b: Optional[tuple] = None
    tri_c: Optional[tuple] = None
    tri_shear_mul: Optional[tuple] = None  # stage 3: Sx*Az etc + z terms
    tri_xy: Optional[tuple] = None         # stage 4: Ax,Ay,Bx,By,Cx,Cy
    tri_bary_prod: Optional[tuple] = None  # stage 5: six edge products
    tri_u: Optional[float] = None          # stage 6
    tri_v: Optional[float] = None
    tri_w: Optional[float] = None
    tri_t_prod: Optional[tuple] = None     # stage 7: U*Az, V*Bz, W*Cz
    tri_det_partial: Optional[float] = None  # stage 8: U+V
    tri_t_partial: Optional[float] = None    # stage 8
    tri_det: Optional[float] = None          # stage 9
    tri_t: Optional[float] = None            # stage 9
    tri_hit: Optional[bool] = None           # stage 10

    # euclidean intermediates
    vec_diff: Optional[tuple] = None     # stage 2 (masked lanes forced +0)
    vec_sq: Optional[tuple] = None       # stage 3
    vec_sum8: Optional[tuple] = None     # stage 4
    vec_sum4: Optional[tuple] = None     # stage 5
    vec_sum2: Optional[tuple] = None     # stage 6
    vec_sum1: Optional[float] = None     # stage 7: the beat partial

    # cosine intermediates
    cos_p: Optional[tuple] = None        # stage 3: a*b lanes
    cos_q: Optional[tuple] = None        # stage 3: b*b lanes
    cos_p4: Optional[tuple] = None       # stage 4
    cos_q4: Optional[tuple] = None
    cos_p2: Optional[tuple] = None       # stage 5
    cos_q2: Optional[tuple] = None
    cos_dot: Optional[float] = None      # stage 6: beat partials
    cos_norm: Optional[float] = None

    # distance outputs (stage 8, the accumulator stage)
    dist_euclid: Optional[float] = None
    dist_dot: Optional[float] = None
    dist_norm: Optional[float] = None
    dist_euclid_reset: Optional[bool] = None
    dist_angular_reset: Optional[bool] = None


SHARED_RECORD_FIELDS = tuple(f.name for f in fields(SharedRecord))
