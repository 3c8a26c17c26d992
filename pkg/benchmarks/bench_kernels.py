"""Compare the compiled geometry kernels against the numpy fallback.

Microbenchmarks call both implementations directly in-process; the
end-to-end row reruns a full synthetic-scene simulation in a subprocess
with VRURISK_PURE_PYTHON toggled, since the backend is fixed at import.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--skip-e2e]
"""

import argparse
import math
import subprocess
import sys
import time

import numpy as np

from vrurisk.geometry import _kernels_py

try:
    from vrurisk.geometry import _kernels as _compiled
except ImportError:
    _compiled = None


def box(cx, cy, heading, length, width):
    c, s = math.cos(heading), math.sin(heading)
    hl, hw = 0.5 * length, 0.5 * width
    local = np.array([(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)])
    out = np.empty_like(local)
    out[:, 0] = cx + c * local[:, 0] - s * local[:, 1]
    out[:, 1] = cy + s * local[:, 0] + c * local[:, 1]
    return np.ascontiguousarray(out)


def bench(fn, args_list, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for args in args_list:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def visibility_cases(rng, n=200):
    cases = []
    for _ in range(n):
        pts = box(rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(0, 6.28), 4.5, 2.0)
        pts = np.ascontiguousarray(np.repeat(pts, 4, axis=0))  # 16 outline points
        boxes = np.ascontiguousarray(
            np.stack([box(rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(0, 6.28), 5.0, 2.0) for _ in range(8)])
        )
        cases.append((0.0, 0.0, pts, boxes, 75.0))
    return cases


def clip_cases(rng, n=200):
    cases = []
    for _ in range(n):
        subject = box(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 6.28), 8.0, 2.0)
        ang = rng.uniform(0, 6.28)
        wedge = np.ascontiguousarray(
            np.array(
                [
                    (0.0, 0.0),
                    (10.0 * math.cos(ang), 10.0 * math.sin(ang)),
                    (10.0 * math.cos(ang + 0.6), 10.0 * math.sin(ang + 0.6)),
                ]
            )
        )
        cases.append((subject, wedge))
    return cases


def projection_cases(rng, n=200):
    cases = []
    for _ in range(n):
        ts = np.linspace(0.0, 5.0, 126)
        line = np.ascontiguousarray(
            np.column_stack([8.0 * ts, 2.0 * np.sin(0.5 * ts + rng.uniform(0, 3))])
        )
        arcs = np.ascontiguousarray(
            np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(line, axis=0).T))])
        )
        poly = box(rng.uniform(5, 30), rng.uniform(-4, 4), rng.uniform(0, 6.28), 4.0, 2.0)
        cases.append((poly, line, arcs))
    return cases


E2E_SNIPPET = """
import time
from vrurisk import synth
from vrurisk.geometry import backend_name
from vrurisk.sim import SimConfig, run

rec = synth.multi_scene(seed=1)
cfg = SimConfig(penetration_rates=(0.5,), seeds=(0,))
t0 = time.perf_counter()
run(rec, 0.5, 0, cfg)
print(f"{backend_name()} {time.perf_counter() - t0:.3f}")
"""


def run_e2e(pure: bool) -> tuple[str, float]:
    env = {"VRURISK_PURE_PYTHON": "1"} if pure else {}
    import os

    proc = subprocess.run(
        [sys.executable, "-c", E2E_SNIPPET],
        capture_output=True,
        text=True,
        env={**os.environ, **env},
        check=True,
    )
    name, seconds = proc.stdout.split()
    return name, float(seconds)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="timing repeats, best-of")
    parser.add_argument("--skip-e2e", action="store_true", help="microbenchmarks only")
    args = parser.parse_args()

    if _compiled is None:
        print("compiled kernels unavailable; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(0)
    rows = [
        ("count_visible (200 targets, 8 boxes)", "count_visible", visibility_cases(rng)),
        ("clip_convex (200 box/wedge pairs)", "clip_convex", clip_cases(rng)),
        ("project_polyline_arcs (200 paths)", "project_polyline_arcs", projection_cases(rng)),
    ]

    print(f"{'benchmark':<42} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, fn_name, cases in rows:
        t_py = bench(getattr(_kernels_py, fn_name), cases, args.repeat)
        t_c = bench(getattr(_compiled, fn_name), cases, args.repeat)
        print(f"{label:<42} {t_py * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms {t_py / t_c:>7.1f}x")

    if not args.skip_e2e:
        name_c, t_c = run_e2e(pure=False)
        name_py, t_py = run_e2e(pure=True)
        label = "full scene replay (9 agents, 8 s)"
        print(f"{label:<42} {t_py * 1e3:>8.0f}ms {t_c * 1e3:>8.0f}ms {t_py / t_c:>7.1f}x")
        if name_c != "compiled" or name_py != "python":
            print(f"warning: backends resolved as {name_c}/{name_py}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
