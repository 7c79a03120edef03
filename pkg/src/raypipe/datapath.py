"""The concrete 11-stage datapath over SharedRecord.

Stage map (stage 1 and 11 are the IO format converters and carry no
counted functional units):

    stage  quad-box                triangle                 euclidean        cosine
    1      unpack                  unpack                   unpack           unpack
    2      corner translate (24a)  vertex translate (9a)    lane diffs (16a) -
    3      slab products (24m)     shear products (9m)      lane squares(16m) lane products (16m)
    4      intervals+sort (44c+qs) shear offsets (6a)       tree 16->8 (8a)  trees 8->4 (8a)
    5      -                       barycentric prods (6m)   tree 8->4 (4a)   trees 4->2 (4a)
    6      -                       barycentric edges (3a)   tree 4->2 (2a)   trees 2->1 (2a)
    7      -                       distance prods (3m)      tree 2->1 (1a)   -
    8      -                       U+V, UAz+VBz (2a)        accumulate (1a)  accumulate (2a)
    9      -                       det, T (2a)              -                -
    10     -                       hit test (1m+5c)         -                -
    11     pack                    pack                     pack             pack

Box comparators per box (11): one interval-order comparator per axis,
three entry-side reduce/clamp, three exit-side reduce/clamp, and the
two hit checks; the triangle's determinant-zero test is a zero-detect
flag rather than a magnitude comparator, so stage 10 counts five.  A
quad-sort unit counts as five comparators.  Under this convention the
baseline unified inventory totals exactly 125 ops/cycle.

Sequential arithmetic is spread over consecutive stages (the triangle
distance sum occupies stages 7-9, its determinant shares stages 8-9),
parallel work shares a stage, and the box operation is idle in stages
5 to 9 where its record is copied through unchanged.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from . import kernels
from .f32 import fadd
from .pipeline import Handshake, Pipeline, SkidStage
from .types import (BoxResult, DistanceResult, JobInput, JobOutput,
                    MISS_BOX_RESULT, MISS_TRIANGLE_RESULT, Opcode, SharedRecord,
                    SHARED_RECORD_FIELDS, TriangleResult, ZERO_DISTANCE_RESULT)

STAGE_COUNT = 11

#: ops/cycle of the baseline unified configuration under the counting
#: convention above; the stats command reports any deviation.
BASELINE_UNIFIED_BUDGET = 125


class FeatureSet(Enum):
    BASELINE = "baseline"
    EXTENDED = "extended"


class FuSharing(Enum):
    UNIFIED = "unified"
    DISJOINT = "disjoint"


@dataclass(frozen=True)
class DatapathConfig:
    features: FeatureSet = FeatureSet.BASELINE
    sharing: FuSharing = FuSharing.UNIFIED

    def opcodes(self):
        if self.features is FeatureSet.EXTENDED:
            return (Opcode.QUAD_BOX, Opcode.TRIANGLE, Opcode.EUCLIDEAN, Opcode.COSINE)
        return (Opcode.QUAD_BOX, Opcode.TRIANGLE)


class ConfigError(ValueError):
    """Opcode not supported by the configured feature set."""


FU_TYPES = ("adders", "multipliers", "comparators", "quadsort")

# static per-operation functional-unit needs, stage -> {type: count}
OP_FU_USE = {
    Opcode.QUAD_BOX: {
        2: {"adders": 24},
        3: {"multipliers": 24},
        4: {"comparators": 44, "quadsort": 1},
    },
    Opcode.TRIANGLE: {
        2: {"adders": 9},
        3: {"multipliers": 9},
        4: {"adders": 6},
        5: {"multipliers": 6},
        6: {"adders": 3},
        7: {"multipliers": 3},
        8: {"adders": 2},
        9: {"adders": 2},
        10: {"multipliers": 1, "comparators": 5},
    },
    Opcode.EUCLIDEAN: {
        2: {"adders": 16},
        3: {"multipliers": 16},
        4: {"adders": 8},
        5: {"adders": 4},
        6: {"adders": 2},
        7: {"adders": 1},
        8: {"adders": 1},
    },
    Opcode.COSINE: {
        3: {"multipliers": 16},
        4: {"adders": 8},
        5: {"adders": 4},
        6: {"adders": 2},
        8: {"adders": 2},
    },
}

# stage-3 multiplier form: (square, general); a y=x*x multiplier can be
# specialised into a cheaper squarer by synthesis, so the activity
# report keeps the split
MUL_FORM_STAGE3 = {
    Opcode.QUAD_BOX: (0, 24),
    Opcode.TRIANGLE: (0, 9),
    Opcode.EUCLIDEAN: (16, 0),
    Opcode.COSINE: (8, 8),
}


def op_activity(op: Opcode, stage: int, mask: int) -> dict:
    """Active (non-gated) FU counts for one fired job at one stage.

    Vector lanes disabled by the mask feed zeros to their lane FUs, so
    those units count as gated; the reduce trees still run.
    """
    use = OP_FU_USE[op].get(stage)
    if use is None:
        return {}
    if op is Opcode.EUCLIDEAN and stage in (2, 3):
        lanes = (mask & 0xFFFF).bit_count()
        return {("adders" if stage == 2 else "multipliers"): lanes}
    if op is Opcode.COSINE and stage == 3:
        return {"multipliers": 2 * (mask & 0xFF).bit_count()}
    return use


# --------------------------------------------------------------------------
# inventory and activity accounting

class FuInventory:
    """Static per-stage functional-unit provisioning for a configuration.

    Unified sharing provisions the per-type maximum over the supported
    operations at each stage; disjoint provisions the sum (private FUs
    per operation).  Format converters (stages 1 and 11) are excluded.
    """

    def __init__(self, config: DatapathConfig):
        self.config = config
        agg = max if config.sharing is FuSharing.UNIFIED else sum
        self.stages = {}
        for stage in range(2, STAGE_COUNT):
            counts = {}
            for fu in FU_TYPES:
                need = [OP_FU_USE[op].get(stage, {}).get(fu, 0) for op in config.opcodes()]
                counts[fu] = agg(need)
            self.stages[stage] = counts

    def stage_ops(self, stage: int) -> int:
        c = self.stages.get(stage, {})
        return (c.get("adders", 0) + c.get("multipliers", 0)
                + c.get("comparators", 0) + 5 * c.get("quadsort", 0))

    def total_ops(self) -> int:
        return sum(self.stage_ops(s) for s in self.stages)


class FuActivity:
    """Per-cycle activity counters: how many FUs received real inputs."""

    def __init__(self):
        self.by_stage = {}        # stage -> {fu: active-FU cycles}
        self.by_op = {}           # (op, stage) -> {fu: active-FU cycles}
        self.fires = {}           # op -> fired jobs
        self.mul_form = {}        # op -> [square, general] totals at stage 3

    def record(self, op: Opcode, stage: int, mask: int):
        act = op_activity(op, stage, mask)
        if not act:
            return
        bs = self.by_stage.setdefault(stage, dict.fromkeys(FU_TYPES, 0))
        bo = self.by_op.setdefault((op, stage), dict.fromkeys(FU_TYPES, 0))
        for fu, n in act.items():
            bs[fu] += n
            bo[fu] += n
        if stage == 3:
            sq, gen = MUL_FORM_STAGE3[op]
            if op is Opcode.EUCLIDEAN:
                sq = (mask & 0xFFFF).bit_count()
            elif op is Opcode.COSINE:
                sq = gen = (mask & 0xFF).bit_count()
            mf = self.mul_form.setdefault(op, [0, 0])
            mf[0] += sq
            mf[1] += gen


@dataclass
class FuReport:
    config: DatapathConfig
    inventory: FuInventory
    activity: FuActivity
    cycles: int
    fires: dict

    def utilization(self) -> float:
        cap = self.inventory.total_ops() * max(self.cycles, 1)
        used = 0
        for stage, counts in self.activity.by_stage.items():
            used += (counts["adders"] + counts["multipliers"]
                     + counts["comparators"] + 5 * counts["quadsort"])
        return used / cap if cap else 0.0

    def op_stage_rate(self, op: Opcode, stage: int, fu: str) -> float:
        """Average active FUs per fired job of `op` at `stage`."""
        n = self.fires.get(op, 0)
        if not n:
            return 0.0
        return self.activity.by_op.get((op, stage), {}).get(fu, 0) / n

    def text(self) -> str:
        inv = self.inventory
        lines = [f"configuration: {self.config.features.value} / {self.config.sharing.value}",
                 "stage  adders  multipliers  comparators  quadsort  ops/cycle"]
        for stage in range(2, STAGE_COUNT):
            c = inv.stages[stage]
            lines.append(f"{stage:>5}  {c['adders']:>6}  {c['multipliers']:>11}  "
                         f"{c['comparators']:>11}  {c['quadsort']:>8}  {inv.stage_ops(stage):>9}")
        lines.append(f"total ops/cycle: {inv.total_ops()}")
        if (self.config.features is FeatureSet.BASELINE
                and self.config.sharing is FuSharing.UNIFIED):
            total = inv.total_ops()
            verdict = "OK" if total == BASELINE_UNIFIED_BUDGET else "MISMATCH"
            lines.append(f"baseline-unified budget check: {total} vs "
                         f"{BASELINE_UNIFIED_BUDGET} expected -> {verdict}")
        if self.cycles:
            lines.append(f"cycles simulated: {self.cycles}, overall FU utilization: "
                         f"{100.0 * self.utilization():.2f}%")
            for op, n in sorted(self.fires.items(), key=lambda kv: kv[0].value):
                if not n:
                    continue
                parts = []
                for stage in range(2, STAGE_COUNT):
                    bo = self.activity.by_op.get((op, stage))
                    if not bo:
                        continue
                    ops = bo["adders"] + bo["multipliers"] + bo["comparators"] + 5 * bo["quadsort"]
                    parts.append(f"s{stage}:{ops / n:.1f}")
                lines.append(f"  {op.value}: {n} jobs, avg active ops/stage {' '.join(parts)}")
                if op in self.activity.mul_form:
                    sq, gen = self.activity.mul_form[op]
                    lines.append(f"    stage-3 multipliers/job: {sq / n:.1f} square-form, "
                                 f"{gen / n:.1f} general")
        return "\n".join(lines)

    def csv(self) -> str:
        rows = ["stage,adders,multipliers,comparators,quadsort,ops_per_cycle"]
        for stage in range(2, STAGE_COUNT):
            c = self.inventory.stages[stage]
            rows.append(f"{stage},{c['adders']},{c['multipliers']},"
                        f"{c['comparators']},{c['quadsort']},{self.inventory.stage_ops(stage)}")
        rows.append(f"total,,,,,{self.inventory.total_ops()}")
        return "\n".join(rows) + "\n"


# --------------------------------------------------------------------------
# stage logic

@dataclass
class AccumulatorState:
    """Distance accumulators; cleared only by a job's reset flag, and
    only the accumulator belonging to that job's opcode."""

    euclidean_acc: float = 0.0
    angular_dot_acc: float = 0.0
    angular_norm_acc: float = 0.0


def job_to_record(job: JobInput, seq: int = 0) -> SharedRecord:
    """Stage-1 conversion: the external bundle becomes the wide record.
    Every payload field is carried verbatim (don't-care fields included),
    so unpacking is loss-free down to NaN payload bits."""
    return SharedRecord(
        job_seq=seq, opcode=job.opcode, ray=job.ray, boxes=job.boxes,
        child_ptr=job.child_ptr, triangle=job.triangle,
        vec_a=job.euclidean_a, vec_b=job.euclidean_b,
        vec_mask=job.euclidean_mask, reset_acc=job.reset_accumulator)


def record_to_job(rec: SharedRecord) -> JobInput:
    """Inverse of job_to_record (used by the round-trip check)."""
    return JobInput(opcode=rec.opcode, ray=rec.ray, boxes=rec.boxes,
                    child_ptr=rec.child_ptr, triangle=rec.triangle,
                    euclidean_a=rec.vec_a, euclidean_b=rec.vec_b,
                    euclidean_mask=rec.vec_mask, reset_accumulator=rec.reset_acc)


def record_to_output(rec: SharedRecord) -> JobOutput:
    """Stage-11 conversion back to the external output bundle."""
    op = rec.opcode
    box = MISS_BOX_RESULT
    tri = MISS_TRIANGLE_RESULT
    dist = ZERO_DISTANCE_RESULT
    if op is Opcode.QUAD_BOX:
        box = BoxResult(rec.box_hit, rec.box_order, rec.box_tmin, rec.box_ptr_sorted)
    elif op is Opcode.TRIANGLE:
        tri = TriangleResult(rec.tri_hit, rec.tri_t, rec.tri_det, rec.triangle.tri_id)
    elif op in (Opcode.EUCLIDEAN, Opcode.COSINE):
        dist = DistanceResult(rec.dist_euclid, rec.dist_euclid_reset,
                              rec.dist_dot, rec.dist_norm, rec.dist_angular_reset)
    return JobOutput(op, box, tri, dist)


def _stage2(rec: SharedRecord) -> SharedRecord:
    op = rec.opcode
    if op is Opcode.QUAD_BOX:
        origin = rec.ray.origin
        lo = []
        hi = []
        for b in rec.boxes:
            lo_rel, hi_rel = kernels.box_translate(b, origin)
            lo.append(lo_rel)
            hi.append(hi_rel)
        rec.box_lo_rel = tuple(lo)
        rec.box_hi_rel = tuple(hi)
    elif op is Opcode.TRIANGLE:
        rec.tri_a, rec.tri_b, rec.tri_c = kernels.tri_translate(rec.triangle, rec.ray.origin)
    elif op is Opcode.EUCLIDEAN:
        rec.vec_diff = kernels.euclidean_diffs(rec.vec_a, rec.vec_b, rec.vec_mask)
    return rec


def _stage3(rec: SharedRecord) -> SharedRecord:
    op = rec.opcode
    if op is Opcode.QUAD_BOX:
        inv = rec.ray.inv_dir
        tlo = []
        thi = []
        for lo_rel, hi_rel in zip(rec.box_lo_rel, rec.box_hi_rel):
            a, b = kernels.box_products(lo_rel, hi_rel, inv)
            tlo.append(a)
            thi.append(b)
        rec.box_t_lo = tuple(tlo)
        rec.box_t_hi = tuple(thi)
    elif op is Opcode.TRIANGLE:
        rec.tri_shear_mul = kernels.tri_shear_products(rec.tri_a, rec.tri_b, rec.tri_c, rec.ray)
    elif op is Opcode.EUCLIDEAN:
        rec.vec_sq = kernels.euclidean_squares(rec.vec_diff)
    elif op is Opcode.COSINE:
        rec.cos_p, rec.cos_q = kernels.cosine_products(rec.vec_a[:8], rec.vec_b[:8],
                                                       rec.vec_mask & 0xFF)
    return rec


def _stage4(rec: SharedRecord) -> SharedRecord:
    op = rec.opcode
    if op is Opcode.QUAD_BOX:
        ray = rec.ray
        negs = kernels.inv_signs(ray.inv_dir)
        hits = []
        tmins = []
        tmaxs = []
        keys = []
        for tlo, thi in zip(rec.box_t_lo, rec.box_t_hi):
            r = kernels.box_interval(tlo, thi, negs, 0.0, ray.extent)
            hits.append(r.hit)
            tmins.append(r.tmin)
            tmaxs.append(r.tmax)
            keys.append(r.tmin if r.hit else float("inf"))
        order = kernels.sort4(keys, rec.child_ptr)
        rec.box_hit = tuple(hits)
        rec.box_tmin = tuple(tmins)
        rec.box_tmax = tuple(tmaxs)
        rec.box_order = order
        rec.box_ptr_sorted = tuple(rec.child_ptr[i] for i in order)
    elif op is Opcode.TRIANGLE:
        rec.tri_xy = kernels.tri_shear_offsets(rec.tri_a, rec.tri_b, rec.tri_c,
                                               rec.tri_shear_mul, rec.ray.kx, rec.ray.ky)
    elif op is Opcode.EUCLIDEAN:
        rec.vec_sum8 = kernels.add_pairs(rec.vec_sq)
    elif op is Opcode.COSINE:
        rec.cos_p4 = kernels.add_pairs(rec.cos_p)
        rec.cos_q4 = kernels.add_pairs(rec.cos_q)
    return rec


def _stage5(rec: SharedRecord) -> SharedRecord:
    op = rec.opcode
    if op is Opcode.TRIANGLE:
        rec.tri_bary_prod = kernels.tri_bary_products(rec.tri_xy)
    elif op is Opcode.EUCLIDEAN:
        rec.vec_sum4 = kernels.add_pairs(rec.vec_sum8)
    elif op is Opcode.COSINE:
        rec.cos_p2 = kernels.add_pairs(rec.cos_p4)
        rec.cos_q2 = kernels.add_pairs(rec.cos_q4)
    return rec


def _stage6(rec: SharedRecord) -> SharedRecord:
    op = rec.opcode
    if op is Opcode.TRIANGLE:
        rec.tri_u, rec.tri_v, rec.tri_w = kernels.tri_bary_edges(rec.tri_bary_prod)
    elif op is Opcode.EUCLIDEAN:
        rec.vec_sum2 = kernels.add_pairs(rec.vec_sum4)
    elif op is Opcode.COSINE:
        rec.cos_dot = kernels.add_pairs(rec.cos_p2)[0]
        rec.cos_norm = kernels.add_pairs(rec.cos_q2)[0]
    return rec


def _stage7(rec: SharedRecord) -> SharedRecord:
    op = rec.opcode
    if op is Opcode.TRIANGLE:
        rec.tri_t_prod = kernels.tri_distance_products(rec.tri_u, rec.tri_v, rec.tri_w,
                                                       rec.tri_shear_mul)
    elif op is Opcode.EUCLIDEAN:
        rec.vec_sum1 = kernels.add_pairs(rec.vec_sum2)[0]
    return rec


def _make_stage8(acc: AccumulatorState):
    def _stage8(rec: SharedRecord) -> SharedRecord:
        op = rec.opcode
        if op is Opcode.TRIANGLE:
            rec.tri_det_partial = fadd(rec.tri_u, rec.tri_v)
            rec.tri_t_partial = fadd(rec.tri_t_prod[0], rec.tri_t_prod[1])
        elif op is Opcode.EUCLIDEAN:
            total = fadd(acc.euclidean_acc, rec.vec_sum1)
            rec.dist_euclid = total
            # the other operation's output fields are gated to zero: a
            # job's output must not observe the unrelated accumulator
            rec.dist_dot = 0.0
            rec.dist_norm = 0.0
            rec.dist_euclid_reset = rec.reset_acc
            rec.dist_angular_reset = rec.reset_acc
            acc.euclidean_acc = 0.0 if rec.reset_acc else total
        elif op is Opcode.COSINE:
            dot = fadd(acc.angular_dot_acc, rec.cos_dot)
            norm = fadd(acc.angular_norm_acc, rec.cos_norm)
            rec.dist_dot = dot
            rec.dist_norm = norm
            rec.dist_euclid = 0.0
            rec.dist_euclid_reset = rec.reset_acc
            rec.dist_angular_reset = rec.reset_acc
            if rec.reset_acc:
                acc.angular_dot_acc = 0.0
                acc.angular_norm_acc = 0.0
            else:
                acc.angular_dot_acc = dot
                acc.angular_norm_acc = norm
        return rec
    return _stage8


def _stage9(rec: SharedRecord) -> SharedRecord:
    if rec.opcode is Opcode.TRIANGLE:
        rec.tri_det = fadd(rec.tri_det_partial, rec.tri_w)
        rec.tri_t = fadd(rec.tri_t_partial, rec.tri_t_prod[2])
    return rec


def _make_stage10(flip_winding: bool):
    def _stage10(rec: SharedRecord) -> SharedRecord:
        if rec.opcode is Opcode.TRIANGLE:
            if flip_winding:
                ed = kernels.fmul(rec.ray.extent, rec.tri_det)
                rec.tri_hit = ((rec.tri_u <= 0.0) and (rec.tri_v <= 0.0)
                               and (rec.tri_w <= 0.0) and (rec.tri_det < 0.0)
                               and (rec.tri_t <= 0.0) and (rec.tri_t >= ed))
            else:
                rec.tri_hit = kernels.tri_hit_test(rec.tri_u, rec.tri_v, rec.tri_w,
                                                   rec.tri_det, rec.tri_t, rec.ray.extent)
        return rec
    return _stage10


# --------------------------------------------------------------------------

def build_datapath(config: DatapathConfig, *, trace=None, accounting=False,
                   debug_write_once=False, flip_winding=False):
    """Construct the 11-stage pipeline plus its accumulator state.

    Returns (pipeline, accumulator, activity, write_log).  Stage logic is
    identical across configurations; feature set and sharing govern which
    opcodes are admitted and how the FU inventory is provisioned, so
    functional results never depend on the configuration.
    """
    acc = AccumulatorState()
    seq_counter = [0]

    def _unpack(job: JobInput) -> SharedRecord:
        rec = job_to_record(job, seq_counter[0])
        seq_counter[0] += 1
        return rec

    transforms = [_unpack, _stage2, _stage3, _stage4, _stage5, _stage6,
                  _stage7, _make_stage8(acc), _stage9, _make_stage10(flip_winding),
                  record_to_output]

    activity = FuActivity() if accounting else None
    write_log = {} if debug_write_once else None

    stages = []
    for i, fn in enumerate(transforms):
        stage_no = i + 1
        wrapped = fn
        if accounting and 2 <= stage_no <= STAGE_COUNT - 1:
            wrapped = _with_accounting(fn, stage_no, activity)
        if debug_write_once and 2 <= stage_no <= STAGE_COUNT - 1:
            wrapped = _with_write_check(wrapped, stage_no, write_log)
        stages.append(SkidStage(wrapped, name=f"stage{stage_no}"))

    describe = (lambda d: d.opcode.value if isinstance(d, (SharedRecord, JobOutput)) else "data")
    pipe = Pipeline(stages, trace=trace, describe=describe)
    return pipe, acc, activity, write_log


def _with_accounting(fn, stage_no: int, activity: FuActivity):
    def wrapped(rec):
        activity.record(rec.opcode, stage_no, rec.vec_mask)
        return fn(rec)
    return wrapped


_PRISTINE_RECORD = SharedRecord()


def _with_write_check(fn, stage_no: int, write_log: dict):
    def wrapped(rec):
        writers = write_log.get(rec.job_seq)
        if writers is None:
            # first interior stage: everything differing from the record
            # defaults was produced by the unpack stage
            writers = {f: 1 for f in SHARED_RECORD_FIELDS
                       if getattr(rec, f) is not getattr(_PRISTINE_RECORD, f)}
            write_log[rec.job_seq] = writers
        before = [getattr(rec, f) for f in SHARED_RECORD_FIELDS]
        out = fn(rec)
        for f, old in zip(SHARED_RECORD_FIELDS, before):
            if getattr(out, f) is not old:
                prev = writers.get(f)
                if prev is not None and prev != stage_no:
                    raise AssertionError(
                        f"field {f} of job {rec.job_seq} written by stage {prev} "
                        f"and stage {stage_no}")
                writers[f] = stage_no
        return out
    return wrapped


class Datapath:
    """Driver around the pipeline: submit jobs, step cycles, collect
    outputs and functional-unit statistics."""

    def __init__(self, config: DatapathConfig = DatapathConfig(), *,
                 trace=None, accounting=False, debug_write_once=False,
                 record_timing=False, flip_winding=False):
        self.config = config
        self.pipeline, self.accumulators, self.activity, self.write_log = build_datapath(
            config, trace=trace, accounting=accounting,
            debug_write_once=debug_write_once, flip_winding=flip_winding)
        self.inventory = FuInventory(config)
        self._queue = deque()
        self._fires = dict.fromkeys(Opcode, 0)
        self._record_timing = record_timing
        self.input_fire_cycles = []
        self.output_fire_cycles = []
        self._accepted = tuple(config.opcodes())

    @property
    def cycle(self) -> int:
        return self.pipeline.cycle

    def submit(self, job: JobInput):
        if job.opcode not in self._accepted:
            raise ConfigError(f"{job.opcode.value} requires the extended feature set")
        self._queue.append(job)

    def step(self, sink_ready: bool = True) -> Optional[JobOutput]:
        """Advance one cycle; returns the output if one fired."""
        q = self._queue
        if q:
            inp = Handshake(True, q[0])
        else:
            inp = Handshake(False, None)
        out, accepted = self.pipeline.step(inp, sink_ready)
        if inp.valid and accepted:
            job = q.popleft()
            self._fires[job.opcode] += 1
            if self._record_timing:
                self.input_fire_cycles.append(self.pipeline.cycle - 1)
        if out.valid and sink_ready:
            if self._record_timing:
                self.output_fire_cycles.append(self.pipeline.cycle - 1)
            return out.data
        return None

    @property
    def busy(self) -> bool:
        return bool(self._queue) or self.pipeline.occupancy > 0

    def run_one(self, job: JobInput) -> JobOutput:
        """Submit one job and step until its output fires."""
        self.submit(job)
        while True:
            out = self.step(True)
            if out is not None:
                return out

    def stream(self, jobs: Iterable[JobInput], max_queue: int = 8):
        """Feed jobs back to back at full rate, yielding outputs in order."""
        it = iter(jobs)
        exhausted = False
        while True:
            while not exhausted and len(self._queue) < max_queue:
                nxt = next(it, None)
                if nxt is None:
                    exhausted = True
                    break
                self.submit(nxt)
            if exhausted and not self.busy:
                return
            out = self.step(True)
            if out is not None:
                yield out

    def run_all(self, jobs, sink_ready_schedule=None) -> list:
        """Run a job list to completion; sink_ready_schedule is an
        optional iterator of booleans applied per cycle (stalls)."""
        outs = []
        sched = iter(sink_ready_schedule) if sink_ready_schedule is not None else None
        for job in jobs:
            self.submit(job)
        while self.busy:
            ready = True if sched is None else next(sched, True)
            out = self.step(ready)
            if out is not None:
                outs.append(out)
        return outs

    def fu_report(self) -> FuReport:
        if self.activity is None:
            raise ValueError("datapath was built without accounting")
        return FuReport(self.config, self.inventory, self.activity,
                        self.pipeline.cycle, dict(self._fires))
