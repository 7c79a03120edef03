"""Cycle-level model of a fixed-latency ray-tracing datapath.

Exact binary32 intersection and distance kernels, an elastic pipeline
of skid-buffered stages with an 11-cycle fixed latency, and a BVH
harness that renders scenes and answers distance queries through the
simulated datapath.
"""

from .datapath import (BASELINE_UNIFIED_BUDGET, ConfigError, Datapath, DatapathConfig,
                       FeatureSet, FuInventory, FuSharing)
from .kernels import (GeometryError, SlabResult, cosine_partial, euclidean_partial,
                      precompute_ray_transform, quad_box_test, slab_box_test, sort4,
                      watertight_triangle_test)
from .pipeline import Handshake, Pipeline, SkidStage
from .types import (Aabb, BoxResult, DistanceResult, JobInput, JobOutput, Opcode,
                    Ray, SharedRecord, Triangle, TriangleResult, Vec3)

__version__ = "0.1.0"

__all__ = [
    "Aabb", "BASELINE_UNIFIED_BUDGET", "BoxResult", "ConfigError", "cosine_partial",
    "Datapath", "DatapathConfig", "DistanceResult", "euclidean_partial",
    "FeatureSet", "FuInventory", "FuSharing", "GeometryError", "Handshake",
    "JobInput", "JobOutput", "Opcode", "Pipeline", "precompute_ray_transform",
    "quad_box_test", "Ray", "SharedRecord", "SkidStage", "slab_box_test",
    "SlabResult", "sort4", "Triangle", "TriangleResult", "Vec3",
    "watertight_triangle_test",
]
