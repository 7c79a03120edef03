#!/usr/bin/env python3
"""Throughput versus sink stall probability.

Feeds a fixed mixed job stream through the datapath while the sink
accepts with probability (1 - p) each cycle, and reports the measured
initiation interval.  The elastic pipeline should track the sink rate
exactly: cycles/job ~= 1/(1-p), and the output stream stays
bit-identical to the unstalled run at every p.
"""

import hashlib
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np  # noqa: E402

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from conftest import mixed_jobs, output_bits  # noqa: E402

from raypipe.datapath import Datapath, DatapathConfig, FeatureSet  # noqa: E402

EXT = DatapathConfig(FeatureSet.EXTENDED)


def run(jobs, p, seed):
    rng = np.random.default_rng(seed)

    def sink():
        while True:
            for v in rng.random(4096) > p:
                yield bool(v)

    dp = Datapath(EXT)
    h = hashlib.blake2b(digest_size=8)
    outs = dp.run_all(jobs, sink_ready_schedule=None if p == 0.0 else sink())
    for out in outs:
        h.update(output_bits(out))
    return dp.cycle, h.hexdigest()


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 3000
    jobs = list(mixed_jobs(1234, n))
    base_cycles, base_digest = run(jobs, 0.0, 0)
    print(f"jobs: {n}")
    print("p_stall  cycles  cycles/job  ideal  stream")
    for p in (0.0, 0.1, 0.25, 0.5, 0.75, 0.9):
        cycles, digest = run(jobs, p, seed=42)
        ideal = 1.0 / (1.0 - p)
        match = "identical" if digest == base_digest else "DIVERGED"
        print(f"{p:7.2f}  {cycles:6d}  {cycles / n:10.3f}  {ideal:5.2f}  {match}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
