"""4-wide BVH construction and traversal driven through the datapath.

Construction is a deterministic binary median split on the longest
centroid axis, collapsed to four-wide nodes by absorbing grandchildren;
every leaf holds exactly one triangle.  Node boxes are padded outward
by a few binary32 ulps so that the rounded box test can never cull a
subtree whose geometry a ray exactly grazes (padding only ever adds
work, never changes an answer).

Traversal keeps an explicit stack, pushes the hit children of each
internal node in reverse intersection order so the nearest pops first,
and compares candidate distances without dividing: triangle results are
numerator/denominator pairs and t1 < t2 is decided as t1n*t2d < t2n*t1d
in double precision on the host (denominators are positive on hits).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .datapath import Datapath
from .f32 import next_down, next_up
from .kernels import GeometryError, euclidean_partial, fadd, quad_box_test, watertight_triangle_test
from .types import Aabb, JobInput, NULL_BOX, Opcode, Ray, Triangle, TriangleResult, Vec3

_BOX_PAD_ULPS = 4


@dataclass
class BvhNode:
    """Either an internal node (up to four (box, child) slots) or a leaf
    holding one triangle index."""

    leaf_triangle: Optional[int] = None
    child_boxes: tuple = ()
    child_ids: tuple = ()

    @property
    def is_leaf(self) -> bool:
        return self.leaf_triangle is not None


@dataclass
class Bvh:
    nodes: list
    root: int
    triangles: list

    def node_count(self) -> int:
        return len(self.nodes)


def _triangle_bounds(tri: Triangle) -> Aabb:
    xs = (tri.v0[0], tri.v1[0], tri.v2[0])
    ys = (tri.v0[1], tri.v1[1], tri.v2[1])
    zs = (tri.v0[2], tri.v1[2], tri.v2[2])
    return Aabb(Vec3(min(xs), min(ys), min(zs)), Vec3(max(xs), max(ys), max(zs)))


def _merge(a: Aabb, b: Aabb) -> Aabb:
    return Aabb(Vec3(min(a.lo[0], b.lo[0]), min(a.lo[1], b.lo[1]), min(a.lo[2], b.lo[2])),
                Vec3(max(a.hi[0], b.hi[0]), max(a.hi[1], b.hi[1]), max(a.hi[2], b.hi[2])))


def _pad(box: Aabb) -> Aabb:
    n = _BOX_PAD_ULPS
    return Aabb(Vec3(next_down(box.lo[0], n), next_down(box.lo[1], n), next_down(box.lo[2], n)),
                Vec3(next_up(box.hi[0], n), next_up(box.hi[1], n), next_up(box.hi[2], n)))


class _Builder:
    def __init__(self, triangles):
        self.triangles = triangles
        self.bounds = [_triangle_bounds(t) for t in triangles]

    def split(self, idxs):
        """Binary median split -> (left idxs, right idxs)."""
        lo = [min(self.bounds[i].lo[a] for i in idxs) for a in range(3)]
        hi = [max(self.bounds[i].hi[a] for i in idxs) for a in range(3)]
        extents = [hi[a] - lo[a] for a in range(3)]
        axis = max(range(3), key=lambda a: (extents[a], -a))
        ordered = sorted(idxs, key=lambda i: ((self.bounds[i].lo[axis] + self.bounds[i].hi[axis]), i))
        mid = len(ordered) // 2
        return ordered[:mid], ordered[mid:]


def build_bvh(triangles: Sequence[Triangle]) -> Bvh:
    """Deterministic 4-wide BVH over the triangle list (>= 1 triangle)."""
    tris = list(triangles)
    if not tris:
        raise GeometryError("cannot build a BVH over zero triangles")
    builder = _Builder(tris)
    nodes: list = []

    def subtree_bounds(idxs) -> Aabb:
        box = builder.bounds[idxs[0]]
        for i in idxs[1:]:
            box = _merge(box, builder.bounds[i])
        return box

    def emit_leaf(tri_idx: int) -> int:
        nodes.append(BvhNode(leaf_triangle=tri_idx))
        return len(nodes) - 1

    def binary_children(idxs):
        """One binary split level: list of 1 or 2 index groups."""
        if len(idxs) == 1:
            return [idxs]
        left, right = builder.split(idxs)
        return [left, right]

    def emit(idxs) -> int:
        """Emit the 4-wide node for this triangle group."""
        if len(idxs) == 1:
            return emit_leaf(idxs[0])
        groups = []
        for half in binary_children(idxs):
            if len(half) == 1:
                groups.append(half)
            else:
                groups.extend(binary_children(half))  # absorb grandchildren
        boxes = []
        ids = []
        for g in groups:
            boxes.append(_pad(subtree_bounds(g)))
            ids.append(emit(g))
        nodes.append(BvhNode(child_boxes=tuple(boxes), child_ids=tuple(ids)))
        return len(nodes) - 1

    all_idx = list(range(len(tris)))
    if len(all_idx) == 1:
        # single triangle still gets an internal root so traversal always
        # starts with a box test
        leaf = emit_leaf(0)
        nodes.append(BvhNode(child_boxes=(_pad(builder.bounds[0]),), child_ids=(leaf,)))
        root = len(nodes) - 1
    else:
        root = emit(all_idx)
    return Bvh(nodes, root, tris)


def count_reachable_triangles(bvh: Bvh):
    """Multiset of triangle indices reachable from the root."""
    seen = []
    stack = [bvh.root]
    while stack:
        node = bvh.nodes[stack.pop()]
        if node.is_leaf:
            seen.append(node.leaf_triangle)
        else:
            stack.extend(node.child_ids)
    return seen


# --------------------------------------------------------------------------
# traversal

def _better(cand: TriangleResult, best: Optional[TriangleResult]) -> bool:
    # cross-multiplied distance comparison in double precision; hits have
    # t_denom > 0.  Ties go to the lower triangle id so traversal order
    # cannot change the answer.
    if best is None:
        return True
    a = cand.t_num * best.t_denom
    b = best.t_num * cand.t_denom
    if a != b:
        return a < b
    return cand.triangle_id < best.triangle_id


def _worth_visiting(tmin: float, best: Optional[TriangleResult]) -> bool:
    if best is None:
        return True
    return tmin * best.t_denom <= best.t_num


@dataclass
class TraversalState:
    stack: list = field(default_factory=list)
    best: Optional[TriangleResult] = None
    box_jobs: int = 0
    triangle_jobs: int = 0


def _quad_for_node(node: BvhNode):
    boxes = list(node.child_boxes) + [NULL_BOX] * (4 - len(node.child_boxes))
    ids = list(node.child_ids) + [-1] * (4 - len(node.child_ids))
    return tuple(boxes), tuple(ids)


def trace_ray(ray: Ray, bvh: Bvh, datapath: Optional[Datapath], *,
              sorted_children: bool = True, state: Optional[TraversalState] = None
              ) -> TriangleResult:
    """Closest hit along the ray; misses return hit=False.

    With a datapath, every box and triangle test is issued as a pipeline
    job; with None the golden kernels are called directly (the reference
    traversal).  sorted_children=False ignores the intersection order
    (diagnostics only; the answer must not change).
    """
    st = state if state is not None else TraversalState()
    st.stack.append(bvh.root)
    while st.stack:
        node = bvh.nodes[st.stack.pop()]
        if node.is_leaf:
            tri = bvh.triangles[node.leaf_triangle]
            st.triangle_jobs += 1
            if datapath is None:
                res = watertight_triangle_test(ray, tri)
            else:
                res = datapath.run_one(JobInput(Opcode.TRIANGLE, ray=ray, triangle=tri)).tri
            if res.hit and _better(res, st.best):
                st.best = res
            continue
        boxes, ids = _quad_for_node(node)
        st.box_jobs += 1
        if datapath is None:
            res = quad_box_test(ray, boxes, ids)
        else:
            res = datapath.run_one(
                JobInput(Opcode.QUAD_BOX, ray=ray, boxes=boxes, child_ptr=ids)).box
        if sorted_children:
            picks = [(res.tmin[i], res.child_ptr_sorted[rank])
                     for rank, i in enumerate(res.order) if res.hit[i]]
        else:
            picks = [(res.tmin[i], ids[i]) for i in range(4) if res.hit[i]]
        # push far-to-near so the nearest child pops first
        for tmin, child in reversed(picks):
            if child >= 0 and _worth_visiting(tmin, st.best):
                st.stack.append(child)
    return st.best if st.best is not None else TriangleResult(False, 0.0, 0.0, 0)


def exhaustive_best_hit(ray: Ray, triangles: Sequence[Triangle]) -> TriangleResult:
    """Test every triangle directly; the oracle traversal must equal."""
    best = None
    for tri in triangles:
        res = watertight_triangle_test(ray, tri)
        if res.hit and _better(res, best):
            best = res
    return best if best is not None else TriangleResult(False, 0.0, 0.0, 0)


# --------------------------------------------------------------------------
# k-nearest-neighbour queries over the euclidean path

def vector_beats(query, candidate, dim: int):
    """Split a query/candidate pair into 16-lane beats with a partial
    mask on the last beat and the reset flag on the final beat."""
    beats = []
    for base in range(0, dim, 16):
        lanes = min(16, dim - base)
        a = tuple(query[base:base + lanes]) + (0.0,) * (16 - lanes)
        b = tuple(candidate[base:base + lanes]) + (0.0,) * (16 - lanes)
        mask = (1 << lanes) - 1
        beats.append((a, b, mask))
    jobs = []
    for i, (a, b, mask) in enumerate(beats):
        jobs.append(JobInput(Opcode.EUCLIDEAN, euclidean_a=a, euclidean_b=b,
                             euclidean_mask=mask, reset_accumulator=(i == len(beats) - 1)))
    return jobs


def golden_squared_distance(query, candidate, dim: int) -> float:
    """Beat-ordered accumulation with the golden kernel (bit-exact model
    of what the datapath produces)."""
    acc = 0.0
    for job in vector_beats(query, candidate, dim):
        acc = fadd(acc, euclidean_partial(job.euclidean_a, job.euclidean_b, job.euclidean_mask))
    return acc


def knn_query(query, dataset, k: int, datapath: Datapath):
    """ids of the k nearest dataset vectors by streamed squared distance.

    Every candidate is sent as ceil(dim/16) beats with reset on the last
    beat suffix, so candidates stream back to back through the pipeline.
    Ties break toward the lower id.  Requires an extended datapath.
    """
    dim = len(query)
    if dim < 1:
        raise GeometryError("query dimension must be at least 1")
    jobs = []
    last_beat = []
    for idx, cand in enumerate(dataset):
        if len(cand) != dim:
            raise GeometryError(f"dataset vector {idx} has dimension {len(cand)}, query has {dim}")
        beats = vector_beats(query, cand, dim)
        jobs.extend(beats)
        last_beat.append(len(jobs) - 1)
    distances = {}
    targets = set(last_beat)
    cand_of = {j: i for i, j in enumerate(last_beat)}
    for out_idx, out in enumerate(datapath.stream(jobs)):
        if out_idx in targets:
            distances[cand_of[out_idx]] = out.dist.euclidean_accumulator
    ranked = sorted(distances, key=lambda i: (distances[i], i))
    return [(i, distances[i]) for i in ranked[:k]]
