#!/usr/bin/env python3
"""Write a procedural demo scene (a lat/long sphere) as an OBJ file.

Usage: python scripts/make_demo_scene.py out.obj [segments] [rings]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from raypipe.scene import make_sphere, save_obj  # noqa: E402


def main(argv):
    if not argv:
        print(__doc__)
        return 2
    out = argv[0]
    segments = int(argv[1]) if len(argv) > 1 else 12
    rings = int(argv[2]) if len(argv) > 2 else 9
    tris = make_sphere(segments, rings)
    save_obj(out, tris)
    print(f"{out}: {len(tris)} triangles")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
