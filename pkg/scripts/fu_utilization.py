#!/usr/bin/env python3
"""Functional-unit provisioning and activity across the four
configurations.

Prints the per-stage inventory totals for every feature-set/sharing
combination, then drives single-opcode streams at full throughput and
reports the average active FUs per cycle, the software stand-in for a
dynamic-power comparison between the unified and disjoint designs.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from conftest import JOB_GENERATORS  # noqa: E402

from raypipe.datapath import (Datapath, DatapathConfig, FeatureSet, FuInventory,  # noqa: E402
                              FuSharing)
from raypipe.types import Opcode  # noqa: E402


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    print("inventory (ops/cycle):")
    for f in FeatureSet:
        for s in FuSharing:
            inv = FuInventory(DatapathConfig(f, s))
            per_stage = " ".join(f"s{k}:{inv.stage_ops(k)}" for k in sorted(inv.stages))
            print(f"  {f.value:9s} {s.value:9s} total {inv.total_ops():3d}  ({per_stage})")

    print(f"\nactivity at full throughput ({n} jobs per opcode, extended/unified):")
    for op in (Opcode.QUAD_BOX, Opcode.TRIANGLE, Opcode.EUCLIDEAN, Opcode.COSINE):
        gen = JOB_GENERATORS[op]
        kwargs = {"always_full_mask": True} if op in (Opcode.EUCLIDEAN, Opcode.COSINE) else {}
        dp = Datapath(DatapathConfig(FeatureSet.EXTENDED, FuSharing.UNIFIED),
                      accounting=True)
        for _ in dp.stream(gen(99, n, **kwargs)):
            pass
        rep = dp.fu_report()
        stage3 = rep.op_stage_rate(op, 3, "multipliers")
        total = sum(c["adders"] + c["multipliers"] + c["comparators"] + 5 * c["quadsort"]
                    for c in dp.activity.by_stage.values())
        print(f"  {op.value:10s} stage-3 multipliers/job {stage3:5.1f}   "
              f"avg active ops/cycle {total / dp.cycle:6.1f}   "
              f"utilization {100 * rep.utilization():5.1f}%")
        if op in rep.activity.mul_form:
            sq, gen_ = rep.activity.mul_form[op]
            fires = rep.fires[op]
            print(f"  {'':10s} stage-3 split: {sq / fires:.1f} square-form, "
                  f"{gen_ / fires:.1f} general")
    return 0


if __name__ == "__main__":
    sys.exit(main())
