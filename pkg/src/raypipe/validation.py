"""Functional validation: twenty fixed intersection cases.

Nine ray-box and eleven ray-triangle cases covering the behaviours a
correct datapath must show, including the awkward ones: rays coplanar
with a box face multiply 0 by infinity, the resulting NaN loses every
comparison and the box must miss; rays starting on a surface or corner
and pointing away must miss; edge and vertex grazes on a front-facing
triangle must hit.

Each case runs through the golden kernel and through the full pipeline
and both verdicts are checked against the expected one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .datapath import Datapath, DatapathConfig
from .kernels import precompute_ray_transform, quad_box_test, watertight_triangle_test
from .types import Aabb, JobInput, Opcode, Triangle, Vec3

_BOX = Aabb(Vec3(2.0, -1.0, -1.0), Vec3(4.0, 1.0, 1.0))
_EXTENT = 100.0

# front-facing for a +z ray: dir . ((v1-v0) x (v2-v0)) > 0
_TRI = Triangle(Vec3(-1.0, -1.0, 5.0), Vec3(1.0, -1.0, 5.0), Vec3(0.0, 1.0, 5.0), 1)
_TRI_BACK = Triangle(Vec3(-1.0, -1.0, 5.0), Vec3(0.0, 1.0, 5.0), Vec3(1.0, -1.0, 5.0), 2)
_TRI_FAR = Triangle(Vec3(-4.0, -4.0, 90.0), Vec3(4.0, -4.0, 90.0), Vec3(0.0, 4.0, 90.0), 3)
_TRI_X = Triangle(Vec3(5.0, -1.0, -1.0), Vec3(5.0, 1.0, -1.0), Vec3(5.0, 0.0, 1.0), 4)
_TRI_BIG = Triangle(Vec3(-4.0, -4.0, 5.0), Vec3(4.0, -4.0, 5.0), Vec3(0.0, 4.0, 5.0), 5)


@dataclass(frozen=True)
class Case:
    name: str
    kind: str                    # "box" or "triangle"
    origin: Vec3
    direction: Vec3
    expected_hit: bool
    box: Aabb = _BOX
    triangle: Triangle = _TRI
    expected_t: Optional[float] = None   # t_num/t_denom (triangle) or tmin (box)


BOX_CASES = (
    Case("box-1 origin inside box", "box", Vec3(3.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0),
         True, expected_t=0.0),
    Case("box-2 outside, pointing away", "box", Vec3(6.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0), False),
    Case("box-3 on surface, pointing away", "box", Vec3(4.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0), False),
    Case("box-4 on corner, pointing away", "box", Vec3(4.0, 1.0, 1.0), Vec3(1.0, 1.0, 1.0), False),
    Case("box-5 on corner, along edge", "box", Vec3(2.0, -1.0, -1.0), Vec3(0.0, 0.0, 1.0), False),
    Case("box-6 outside, pointing at box", "box", Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0),
         True, expected_t=2.0),
    Case("box-7 two boxes in a row", "box", Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0), True),
    Case("box-8 three boxes in a row, one off path", "box", Vec3(0.0, 0.0, 0.0),
         Vec3(1.0, 0.0, 0.0), True),
    Case("box-9 overlapping a box edge", "box", Vec3(0.0, 1.0, 1.0), Vec3(1.0, 0.0, 0.0), False),
)

TRIANGLE_CASES = (
    Case("tri-1 back face", "triangle", Vec3(0.0, 0.0, 0.0), Vec3(0.0, 0.0, 1.0),
         False, triangle=_TRI_BACK),
    Case("tri-2 front face", "triangle", Vec3(0.0, 0.0, 0.0), Vec3(0.0, 0.0, 1.0),
         True, expected_t=5.0),
    Case("tri-3 edge graze, front", "triangle", Vec3(0.0, -1.0, 0.0), Vec3(0.0, 0.0, 1.0),
         True, expected_t=5.0),
    Case("tri-4 vertex graze, front", "triangle", Vec3(0.0, 1.0, 0.0), Vec3(0.0, 0.0, 1.0),
         True, expected_t=5.0),
    Case("tri-5 clean miss", "triangle", Vec3(3.0, 3.0, 0.0), Vec3(0.0, 0.0, 1.0), False),
    Case("tri-6 parallel to normal, off to the side", "triangle", Vec3(5.0, 5.0, 0.0),
         Vec3(0.0, 0.0, 1.0), False),
    Case("tri-7 far-away triangle", "triangle", Vec3(0.0, 0.0, 0.0), Vec3(0.0, 0.0, 1.0),
         True, triangle=_TRI_FAR, expected_t=90.0),
    Case("tri-8 oblique front hit", "triangle", Vec3(0.0, 0.0, 0.0), Vec3(0.25, 0.125, 1.0),
         True, triangle=_TRI_BIG, expected_t=5.0),
    Case("tri-9 coplanar ray at edge", "triangle", Vec3(-3.0, 0.0, 5.0), Vec3(1.0, 0.0, 0.0), False),
    Case("tri-10 front hit along x axis", "triangle", Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0),
         True, triangle=_TRI_X, expected_t=5.0),
    Case("tri-11 coplanar ray from inside triangle", "triangle", Vec3(0.0, 0.0, 5.0),
         Vec3(1.0, 0.0, 0.0), False),
)

ALL_CASES = BOX_CASES + TRIANGLE_CASES

# boxes used by the multi-box cases; the remaining slots never hit
_ROW_BOXES_7 = (Aabb(Vec3(2.0, -1.0, -1.0), Vec3(4.0, 1.0, 1.0)),
                Aabb(Vec3(6.0, -1.0, -1.0), Vec3(8.0, 1.0, 1.0)),
                Aabb(Vec3(2.0, 5.0, 5.0), Vec3(4.0, 7.0, 7.0)),
                Aabb(Vec3(6.0, 5.0, 5.0), Vec3(8.0, 7.0, 7.0)))
_ROW_BOXES_8 = (Aabb(Vec3(2.0, -1.0, -1.0), Vec3(4.0, 1.0, 1.0)),
                Aabb(Vec3(6.0, -1.0, -1.0), Vec3(8.0, 1.0, 1.0)),
                Aabb(Vec3(10.0, -1.0, -1.0), Vec3(12.0, 1.0, 1.0)),
                Aabb(Vec3(2.0, 5.0, 5.0), Vec3(4.0, 7.0, 7.0)))


def _case_boxes(case: Case):
    if case.name.startswith("box-7"):
        return _ROW_BOXES_7
    if case.name.startswith("box-8"):
        return _ROW_BOXES_8
    return (case.box, case.box, case.box, case.box)


@dataclass
class CaseResult:
    case: Case
    golden_ok: bool
    pipeline_ok: bool
    detail: str

    @property
    def ok(self) -> bool:
        return self.golden_ok and self.pipeline_ok


def _check_box(case: Case, hit: bool, tmin: float, order, hits_all) -> (bool, str):
    if hit != case.expected_hit:
        return False, f"hit={hit}, expected {case.expected_hit}"
    if case.expected_t is not None and hit and tmin != case.expected_t:
        return False, f"tmin={tmin}, expected {case.expected_t}"
    if case.name.startswith("box-8"):
        # three hits sorted by distance, the off-path miss last
        if order != (0, 1, 2, 3) or hits_all != (True, True, True, False):
            return False, f"order={order}, hits={hits_all}"
    return True, "ok"


def _check_triangle(case: Case, res) -> (bool, str):
    if res.hit != case.expected_hit:
        return False, f"hit={res.hit}, expected {case.expected_hit}"
    if case.expected_t is not None and res.hit:
        t = res.t_num / res.t_denom
        if t != case.expected_t:
            return False, f"t={t}, expected {case.expected_t}"
    return True, "ok"


def run_case(case: Case, datapath: Datapath, flip_winding: bool = False) -> CaseResult:
    ray = precompute_ray_transform(case.origin, case.direction, _EXTENT)
    if case.kind == "box":
        boxes = _case_boxes(case)
        ptrs = (0, 1, 2, 3)
        golden = quad_box_test(ray, boxes, ptrs)
        g_hit = any(golden.hit)
        g_tmin = min((t for t, h in zip(golden.tmin, golden.hit) if h), default=0.0)
        gok, gdetail = _check_box(case, g_hit, g_tmin, golden.order, golden.hit)
        out = datapath.run_one(JobInput(Opcode.QUAD_BOX, ray=ray, boxes=boxes, child_ptr=ptrs))
        pok = out.box == golden
        return CaseResult(case, gok, pok, gdetail if not gok else
                          ("pipeline != golden" if not pok else "ok"))
    golden = watertight_triangle_test(ray, case.triangle, flip_winding=flip_winding)
    gok, gdetail = _check_triangle(case, golden)
    out = datapath.run_one(JobInput(Opcode.TRIANGLE, ray=ray, triangle=case.triangle))
    pok = out.tri == golden
    return CaseResult(case, gok, pok, gdetail if not gok else
                      ("pipeline != golden" if not pok else "ok"))


def run_validation(config: DatapathConfig = DatapathConfig(), *,
                   flip_winding: bool = False, trace=None) -> list:
    """All twenty cases through golden kernels and the pipeline."""
    datapath = Datapath(config, flip_winding=flip_winding, trace=trace)
    return [run_case(c, datapath, flip_winding) for c in ALL_CASES]
