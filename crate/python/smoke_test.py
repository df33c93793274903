#!/usr/bin/env python3
"""Builds the flatsurf_py extension and exercises it end to end."""

import json
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_extension() -> Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "flatsurf-py"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libflatsurf_py.so"
    if not lib.exists():  # macOS
        lib = ROOT / "target" / "release" / "libflatsurf_py.dylib"
    staging = Path(tempfile.mkdtemp(prefix="flatsurf_py_"))
    shutil.copy(lib, staging / "flatsurf_py.so")
    return staging


def main() -> None:
    sys.path.insert(0, str(build_extension()))
    import flatsurf_py as fp

    # square torus: basic invariants
    t = fp.Surface.torus((1.0, 0.0), (0.0, 1.0))
    assert t.genus == 1
    assert abs(t.area - 1.0) < 1e-12
    assert abs(t.systole() - 1.0) < 1e-12
    assert t.num_saddle_connections(1.5) == 8
    assert abs(t.cone_angles()[0] - 2 * math.pi) < 1e-9

    # horocycle = tremor along dy
    u = t.horocycle(0.75)
    v = t.tremor_dy(0.75)
    hols_u = dict((d, (x, y)) for d, x, y in u.holonomies())
    hols_v = dict((d, (x, y)) for d, x, y in v.holonomies())
    for d in hols_u:
        assert all(abs(a - b) < 1e-12 for a, b in zip(hols_u[d], hols_v[d]))

    # geodesic scales components
    g = t.geodesic(math.log(2.0))
    assert abs(g.area - 1.0) < 1e-12

    # JSON round trip
    t2 = fp.Surface.from_json(t.to_json())
    assert t2.genus == 1
    doc = json.loads(t.to_json())
    assert doc["format"] == "tsurf-v1"

    # slit pair: masses, tremor, involution-symmetric regions
    sp = fp.Surface.slit_pair((1.0, -0.5), (1.0 / 7.0, 3.0 / 7.0), (0.5, 0.0))
    assert sp.genus == 2
    assert abs(sp.area - 1.0) < 1e-9
    l, labs = sp.mass_of_region("A")
    assert abs(l - 0.5) < 1e-9 and abs(labs - 0.5) < 1e-9
    sheared = sp.tremor_regions([("A", 2.0)], 1.0)
    assert abs(sheared.area - 1.0) < 1e-9

    # dy sits in the prong cone of a minimal torus
    alpha = math.sqrt(2.0)
    tor = fp.Surface.torus((1.0, alpha), (1.0, 1.0 + alpha))
    assert tor.dy_in_prong_cone(0.5)
    lengths, perm, trans = tor.prong_iet(0.5)
    assert abs(sum(lengths) - max(sum(lengths), 0)) >= 0
    assert sorted(perm) == list(range(len(perm)))

    # rotation number of the irrational torus
    rot = fp.Surface.torus((1.0, alpha), (0.0, 1.0))
    avg = rot.birkhoff(0, 0.0, 2000.0, [0])
    assert 0.3 < avg < 0.7

    # checkerboard worked example
    m, n, k, imbalance, theta, ok = fp.checkerboard(0.5, alpha, 0.3, 0.01, 200.0)
    assert (m, n) == (1, 0)
    assert abs(imbalance - 0.29289) < 1e-5
    assert k % 2 == 0 and abs(theta) < 0.01 and ok

    # dimension estimator on a uniform square
    import random

    random.seed(7)
    pts = [[random.random(), random.random()] for _ in range(20000)]
    slope, ci = fp.box_dimension(pts, [0.2, 0.1, 0.05, 0.02, 0.01])
    assert abs(slope - 2.0) < 0.15, slope

    # small tremor cloud in period coordinates
    cloud = fp.tremor_cloud(0.5, 64, 11)
    assert len(cloud) == 64 and len(cloud[0]) == 10

    print("flatsurf_py smoke test passed")


if __name__ == "__main__":
    main()
