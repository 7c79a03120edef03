"""Command-line front end.

Subcommands:
  validate  run the twenty functional intersection cases
  render    trace an OBJ scene to a PPM image through the pipeline
  knn       k-nearest-neighbour query over a CSV vector dataset
  stats     print the functional-unit inventory for a configuration

Exit codes: 0 success, 1 check failure, 2 usage/configuration error.
Options may come from a flat `key = value` config file (# comments),
with command-line flags taking precedence.  Unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace
from typing import Optional

from .bvh import knn_query
from .datapath import (BASELINE_UNIFIED_BUDGET, ConfigError, Datapath, DatapathConfig,
                       FeatureSet, FuInventory, FuSharing)
from .scene import load_obj, render, write_ppm
from .validation import run_validation


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    features: str = "baseline"
    sharing: str = "unified"
    trace: Optional[str] = None
    seed: int = 0
    threads: int = 1
    scene: Optional[str] = None
    dataset: Optional[str] = None
    output: Optional[str] = None

    def datapath_config(self) -> DatapathConfig:
        try:
            return DatapathConfig(FeatureSet(self.features), FuSharing(self.sharing))
        except ValueError as exc:
            raise UsageError(f"bad configuration value: {exc}") from exc


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}
_INT_KEYS = {"seed", "threads"}


def parse_config_file(path) -> dict:
    """Flat key = value lines; '#' starts a comment; unknown keys rejected."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            if key in _INT_KEYS:
                try:
                    values[key] = int(val)
                except ValueError as exc:
                    raise UsageError(f"{path}:{lineno}: {key} must be an integer") from exc
            else:
                values[key] = val
    return values


def build_run_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = replace(cfg, **parse_config_file(args.config))
    overrides = {}
    for key in ("features", "sharing", "trace", "seed", "threads",
                "scene", "dataset", "output"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def _open_trace(cfg: RunConfig):
    return open(cfg.trace, "w", encoding="ascii") if cfg.trace else None


def cmd_validate(args) -> int:
    cfg = build_run_config(args)
    dp_cfg = cfg.datapath_config()
    trace = _open_trace(cfg)
    try:
        results = run_validation(dp_cfg, flip_winding=(args.mutate == "flip-cull"),
                                 trace=trace)
    finally:
        if trace:
            trace.close()
    failures = 0
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        detail = "" if r.ok else f"  [{r.detail}]"
        print(f"{status}  {r.case.name}{detail}")
        failures += 0 if r.ok else 1
    print(f"{len(results) - failures}/{len(results)} cases passed")
    return 0 if failures == 0 else 1


def cmd_render(args) -> int:
    cfg = build_run_config(args)
    if not cfg.scene or not cfg.output:
        raise UsageError("render needs --scene and --out")
    dp_cfg = cfg.datapath_config()
    triangles = load_obj(cfg.scene)
    trace = _open_trace(cfg)
    # tracing serializes the render: band-to-worker assignment must not
    # depend on thread scheduling or the trace bytes would vary
    threads = 1 if trace else cfg.threads
    try:
        sample_dp = Datapath(dp_cfg, accounting=True, trace=trace)
        first = [True]

        def factory():
            # the first worker carries the accounting/trace datapath
            if first[0]:
                first[0] = False
                return sample_dp
            return Datapath(dp_cfg, accounting=True)

        pixels = render(triangles, args.width, args.height,
                        datapath_factory=factory, threads=threads)
    finally:
        if trace:
            trace.close()
    write_ppm(cfg.output, args.width, args.height, pixels)
    print(f"wrote {cfg.output}: {args.width}x{args.height}, {len(triangles)} triangles")
    if sample_dp.activity is not None and sample_dp.cycle:
        print(sample_dp.fu_report().text())
    return 0


def _load_csv_vectors(path):
    from .f32 import f32
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([f32(float(tok)) for tok in line.split(",")])
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: bad vector row") from exc
    return rows


def cmd_knn(args) -> int:
    cfg = build_run_config(args)
    if not cfg.dataset:
        raise UsageError("knn needs --dataset")
    dp_cfg = cfg.datapath_config()
    if dp_cfg.features is not FeatureSet.EXTENDED:
        raise UsageError("knn requires --features extended")
    from .f32 import f32
    query = [f32(float(tok)) for tok in args.query.split(",")]
    dataset = _load_csv_vectors(cfg.dataset)
    trace = _open_trace(cfg)
    try:
        dp = Datapath(dp_cfg, trace=trace)
        ranked = knn_query(query, dataset, args.k, dp)
    finally:
        if trace:
            trace.close()
    for rank, (idx, dist) in enumerate(ranked, 1):
        print(f"{rank}\t{idx}\t{dist!r}")
    return 0


def cmd_stats(args) -> int:
    cfg = build_run_config(args)
    dp_cfg = cfg.datapath_config()
    inv = FuInventory(dp_cfg)
    dp = Datapath(dp_cfg, accounting=True)
    print(dp.fu_report().text())
    if args.csv:
        with open(args.csv, "w", encoding="ascii") as fh:
            fh.write(dp.fu_report().csv())
    ok = True
    if dp_cfg.features is FeatureSet.BASELINE and dp_cfg.sharing is FuSharing.UNIFIED:
        ok = inv.total_ops() == BASELINE_UNIFIED_BUDGET
    # monotonic sanity across configurations
    base_uni = FuInventory(DatapathConfig(FeatureSet.BASELINE, FuSharing.UNIFIED))
    ext_uni = FuInventory(DatapathConfig(FeatureSet.EXTENDED, FuSharing.UNIFIED))
    ext_dis = FuInventory(DatapathConfig(dp_cfg.features, FuSharing.DISJOINT))
    this_uni = FuInventory(DatapathConfig(dp_cfg.features, FuSharing.UNIFIED))
    print(f"direction checks: extended>baseline (unified): "
          f"{ext_uni.total_ops()}>{base_uni.total_ops()} "
          f"{'OK' if ext_uni.total_ops() > base_uni.total_ops() else 'FAIL'}; "
          f"disjoint>=unified per stage: "
          f"{'OK' if all(ext_dis.stage_ops(s) >= this_uni.stage_ops(s) for s in range(2, 11)) else 'FAIL'}")
    return 0 if ok else 1


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="raypipe",
                                description="cycle-level ray-tracing datapath model")
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--features", choices=["baseline", "extended"])
    p.add_argument("--sharing", choices=["unified", "disjoint"])
    p.add_argument("--trace", help="write a per-cycle handshake trace CSV here")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="run the twenty functional cases")
    v.add_argument("--mutate", choices=["flip-cull"],
                   help="deliberately break the culling test (suite must catch it)")
    v.set_defaults(fn=cmd_validate)

    r = sub.add_parser("render", help="render an OBJ scene to PPM")
    r.add_argument("--scene", required=False)
    r.add_argument("--out", dest="output")
    r.add_argument("--width", type=int, default=64)
    r.add_argument("--height", type=int, default=64)
    r.set_defaults(fn=cmd_render)

    k = sub.add_parser("knn", help="nearest neighbours over the euclidean path")
    k.add_argument("--dataset", required=False, help="CSV, one vector per row")
    k.add_argument("--query", required=True, help="comma-separated query vector")
    k.add_argument("-k", type=int, default=5)
    k.set_defaults(fn=cmd_knn)

    s = sub.add_parser("stats", help="functional-unit inventory")
    s.add_argument("--csv", help="also write the inventory table as CSV")
    s.set_defaults(fn=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
