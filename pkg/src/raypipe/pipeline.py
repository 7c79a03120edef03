"""Cycle-stepped elastic pipeline built from two-slot skid buffers.

Each stage wraps user-supplied transform logic in a buffer with a main
and a skid register and talks valid/ready on both sides.  A transfer
("fire") happens in a cycle iff valid and ready are both up.  The
defining property of the skid buffer is that a stage's input ready is a
function of its own registered state only, never of its downstream's
ready in the same cycle, so there is no combinational ready chain and a
whole pipeline steps in one downstream-to-upstream pass.

Timing model: registered outputs.  Data fired into a stage during cycle
t is visible at that stage's output during cycle t+1, so a job fired
into an N-stage pipeline at cycle t fires out at exactly t+N when the
sink never stalls.

Transforms may hold private state (e.g. accumulators); state mutates
only when an input fires, which makes behaviour invariant under any
stall schedule.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Optional


class Handshake(NamedTuple):
    """Producer side of a valid/ready link; data is only meaningful when
    valid is set."""

    valid: bool
    data: object = None


_EMPTY = object()  # sentinel: register holds nothing (None is legal data)


class SkidStage:
    """One elastic stage: transform logic behind a two-entry buffer.

    Capacity is exactly two (main + skid).  Input is accepted whenever
    the skid register is free; that keeps full throughput under
    alternating downstream stalls while upstream ready stays decoupled
    from downstream ready.
    """

    __slots__ = ("transform", "name", "_main", "_skid")

    def __init__(self, transform: Callable, name: str = ""):
        self.transform = transform
        self.name = name
        self._main = _EMPTY
        self._skid = _EMPTY

    @property
    def occupancy(self) -> int:
        return (self._main is not _EMPTY) + (self._skid is not _EMPTY)

    def input_ready(self) -> bool:
        return self._skid is _EMPTY

    def peek(self):
        """(valid, data) currently presented at the output."""
        if self._main is _EMPTY:
            return False, None
        return True, self._main

    def step(self, in_valid: bool, in_data, downstream_ready: bool):
        """Advance one cycle; returns (out_valid, out_data, in_ready) as
        they were presented during this cycle."""
        out_valid = self._main is not _EMPTY
        out_data = self._main if out_valid else None
        in_ready = self._skid is _EMPTY

        if out_valid and downstream_ready:
            self._main = _EMPTY
        if self._main is _EMPTY and self._skid is not _EMPTY:
            self._main = self._skid
            self._skid = _EMPTY
        if in_valid and in_ready:
            produced = self.transform(in_data)
            if self._main is _EMPTY:
                self._main = produced
            else:
                self._skid = produced
        return out_valid, out_data, in_ready


def stage_step(stage: SkidStage, inp: Handshake, downstream_ready: bool):
    """Functional wrapper over SkidStage.step."""
    out_valid, out_data, in_ready = stage.step(inp.valid, inp.data, downstream_ready)
    return Handshake(out_valid, out_data), in_ready


class Pipeline:
    """A chain of SkidStages stepped as one synchronous unit.

    All valid/ready signals are functions of registered state, so one
    pass over the stages per cycle suffices; stages are updated against
    a start-of-cycle snapshot of their neighbours' outputs.
    """

    def __init__(self, stages, trace=None, describe: Optional[Callable] = None):
        self.stages = list(stages)
        if not self.stages:
            raise ValueError("pipeline needs at least one stage")
        self.cycle = 0
        self._trace = trace
        self._describe = describe or (lambda d: "")
        if trace is not None:
            trace.write("cycle,stage,in_valid,in_ready,out_valid,out_ready,opcode\n")

    def __len__(self):
        return len(self.stages)

    @property
    def occupancy(self) -> int:
        return sum(s.occupancy for s in self.stages)

    def source_ready(self) -> bool:
        return self.stages[0].input_ready()

    def step(self, inp: Handshake, sink_ready: bool):
        """Advance every stage one cycle.  Returns (output handshake as
        presented this cycle, whether the pipeline accepted `inp`)."""
        if self._trace is None:
            return self._step_fast(inp, sink_ready)
        return self._step_traced(inp, sink_ready)

    def _step_fast(self, inp: Handshake, sink_ready: bool):
        # one downstream-to-upstream pass over pre-update register state;
        # each stage's ready is captured before the stage itself updates
        # and its input is read before the upstream stage updates
        stages = self.stages
        last = stages[-1]
        out_main = last._main
        out_valid = out_main is not _EMPTY
        out_data = out_main if out_valid else None
        down_ready = sink_ready
        for i in range(len(stages) - 1, -1, -1):
            st = stages[i]
            my_ready = st._skid is _EMPTY
            if i:
                prev_main = stages[i - 1]._main
                in_valid = prev_main is not _EMPTY
                in_data = prev_main
            else:
                in_valid = inp.valid
                in_data = inp.data
            if st._main is not _EMPTY and down_ready:
                st._main = _EMPTY
            if st._main is _EMPTY and st._skid is not _EMPTY:
                st._main = st._skid
                st._skid = _EMPTY
            if in_valid and my_ready:
                produced = st.transform(in_data)
                if st._main is _EMPTY:
                    st._main = produced
                else:
                    st._skid = produced
            down_ready = my_ready
        self.cycle += 1
        return Handshake(out_valid, out_data), down_ready

    def _step_traced(self, inp: Handshake, sink_ready: bool):
        stages = self.stages
        n = len(stages)
        # start-of-cycle snapshot of every link
        valids = [inp.valid]
        datas = [inp.data]
        for s in stages[:-1]:
            v, d = s.peek()
            valids.append(v)
            datas.append(d)
        readies = [s.input_ready() for s in stages]
        readies.append(sink_ready)

        out_valid, out_data = stages[-1].peek()
        for i in range(n):
            stages[i].step(valids[i], datas[i], readies[i + 1])

        w = self._trace.write
        cyc = self.cycle
        for i in range(n):
            ov = (valids[i + 1] if i + 1 < n else out_valid)
            od = (datas[i + 1] if i + 1 < n else out_data)
            w(f"{cyc},{i + 1},{int(valids[i])},{int(readies[i])},"
              f"{int(ov)},{int(readies[i + 1])},"
              f"{self._describe(od) if ov else 'bubble'}\n")

        self.cycle += 1
        return Handshake(out_valid, out_data), readies[0]
